#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "himpute/execution.hpp"
#include "himpute/svt.hpp"
#include "himpute/timeseries.hpp"

namespace himpute {

/// Half-open range [begin, end) of 0-based time indices.
struct BlockRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  /// 1-based inclusive form, e.g. "[1..104]".
  std::string label() const;
  friend bool operator==(const BlockRange&, const BlockRange&) = default;
};

struct HiConfig {
  /// Empty selects the square-ish lag per block.
  std::optional<std::size_t> lag;
  SolverConfig solver;
  /// Empty means a single block spanning the whole series.
  std::optional<std::size_t> block_size;
  /// Divide each variable by its observed standard deviation within a block
  /// before completion and undo afterwards.
  bool standardize = false;
};

struct BlockDiagnostics {
  BlockRange range;
  std::size_t lag = 0;
  int iterations = 0;
  double residual = 0.0;
  double nuclear_norm = 0.0;
  std::size_t rank_estimate = 0;
  bool converged = false;
  double seconds = 0.0;
};

struct ImputeResult {
  TimeSeries series;
  std::vector<BlockDiagnostics> per_block;
  std::string method;

  bool converged() const;
};

/// ceil((n + 1) / (d + 1)) clamped to [1, n].
std::size_t auto_lag(std::size_t length, std::size_t dim);

/// ceil(n / b) contiguous ranges whose lengths differ by at most one.
std::vector<BlockRange> split_blocks(std::size_t length, std::size_t block_size);

/// Hankel imputation. Blocks are solved independently; the parallel path
/// distributes them over OpenMP threads and matches the serial path exactly.
ImputeResult impute_hi(const TimeSeries& series, const HiConfig& config, Execution exec = Execution::parallel);

}  // namespace himpute
