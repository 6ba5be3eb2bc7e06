#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "himpute/execution.hpp"
#include "himpute/imputer.hpp"
#include "himpute/scoring.hpp"
#include "himpute/timeseries.hpp"

namespace himpute {

inline constexpr const char* kHiMethod = "hi";

/// "hi" or one of the baseline names.
bool is_known_method(const std::string& name);

/// Runs one named method on a gappy series. `diagnostics` receives the HI
/// per-block report when non-null.
TimeSeries run_method(const std::string& method, const TimeSeries& gappy, const HiConfig& hi,
                      ImputeResult* diagnostics = nullptr);

/// One HI configuration in a parameter sweep, labelled for the CSV.
struct SweepVariant {
  std::string label;
  HiConfig hi;
};

struct SweepSpec {
  std::string dataset;
  TimeSeries truth{1, 1};
  std::vector<double> levels;
  std::size_t trials = 10;
  std::vector<std::string> methods;
  /// Column name for the variant labels ("lag", "block_size"); empty for a
  /// plain benchmark with a single HI configuration.
  std::string variant_column;
  std::vector<SweepVariant> variants;
  SmoothConfig smooth;
  std::uint64_t seed = 1;
};

struct TrialRecord {
  std::string method;
  double level = 0.0;
  std::size_t trial = 0;
  std::string variant;
  std::optional<ScorePair> score;
  double wall_time_s = 0.0;
  bool converged = true;
  std::string error;
};

/// Trial i draws one nested missingness plan over all levels from
/// derive_seed(seed, i). Records come back in (variant, level, trial,
/// method) order whatever the execution mode.
std::vector<TrialRecord> run_sweep(const SweepSpec& spec, Execution exec = Execution::parallel);

/// Long format, one row per record:
/// dataset,method,level,trial[,<variant>],trend_score,noise_score,wall_time_s,error
/// With `timing` false the wall time field is left empty so the file is a
/// pure function of the inputs.
std::string format_results_csv(const SweepSpec& spec, const std::vector<TrialRecord>& records, bool timing = true);

/// Per (method, level, variant): successful trial count, means and 95% CI
/// half-widths, mean wall time.
std::string format_summary_csv(const SweepSpec& spec, const std::vector<TrialRecord>& records, bool timing = true);

}  // namespace himpute
