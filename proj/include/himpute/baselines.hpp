#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "himpute/execution.hpp"
#include "himpute/timeseries.hpp"

namespace himpute {

enum class BaselineMethod { linear, spline, stine, kalman, ewma };

std::string_view to_string(BaselineMethod method);
std::optional<BaselineMethod> parse_baseline(std::string_view name);

// Univariate imputers. `observed` flags which entries of `values` are known;
// the others are never read. Observed entries are returned unchanged. All
// throw PreconditionError when there are too few observed points.

/// Straight lines between observed neighbours, constant beyond the ends.
std::vector<double> impute_linear(std::span<const double> values, std::span<const std::uint8_t> observed);

/// Natural cubic spline through the observed points; linear extension of the
/// boundary slope outside the observed range.
std::vector<double> impute_spline(std::span<const double> values, std::span<const std::uint8_t> observed);

/// Stineman interpolation (scaled variant), constant beyond the ends.
std::vector<double> impute_stine(std::span<const double> values, std::span<const std::uint8_t> observed);

/// Exponentially weighted mean of up to `half_width` observed values each
/// side, weight 2^-distance. The window widens until it holds an observation.
std::vector<double> impute_ewma(std::span<const double> values, std::span<const std::uint8_t> observed,
                                std::size_t half_width = 4);

/// Maximum-likelihood local-level model (random-walk level plus observation
/// noise), variances in data units squared.
struct LocalLevelFit {
  double level_variance = 0.0;
  double noise_variance = 0.0;
  double log_likelihood = 0.0;
  /// Observed values have zero variance; imputation falls back to their mean.
  bool degenerate = false;
};

LocalLevelFit fit_local_level(std::span<const double> values, std::span<const std::uint8_t> observed);

/// Missing values from the fixed-interval smoothed level of the fitted model.
std::vector<double> impute_kalman(std::span<const double> values, std::span<const std::uint8_t> observed,
                                  LocalLevelFit* fit = nullptr);

/// Applies a univariate method to each variable. The parallel path spreads
/// variables over OpenMP threads.
TimeSeries impute_baseline(const TimeSeries& series, BaselineMethod method, Execution exec = Execution::parallel);

}  // namespace himpute
