#include "himpute/imputer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <exception>

#include "himpute/error.hpp"
#include "himpute/hankel.hpp"

namespace himpute {

namespace {

struct BlockOutcome {
  TimeSeries filled;
  BlockDiagnostics diagnostics;
};

// Per-variable observed standard deviation; 1 when degenerate.
std::vector<double> observed_scales(const TimeSeries& block) {
  std::vector<double> scales(block.dim(), 1.0);
  for (std::size_t v = 0; v < block.dim(); ++v) {
    double sum = 0.0, sq = 0.0;
    std::size_t count = 0;
    for (std::size_t t = 0; t < block.length(); ++t) {
      if (!block.observed(t, v)) continue;
      sum += block.value(t, v);
      ++count;
    }
    if (count < 2) continue;
    const double mean = sum / static_cast<double>(count);
    for (std::size_t t = 0; t < block.length(); ++t) {
      if (block.observed(t, v)) sq += (block.value(t, v) - mean) * (block.value(t, v) - mean);
    }
    const double sd = std::sqrt(sq / static_cast<double>(count - 1));
    if (sd > 0.0) scales[v] = sd;
  }
  return scales;
}

BlockOutcome solve_block(const TimeSeries& block, const BlockRange& range, const HiConfig& config) {
  const auto start = std::chrono::steady_clock::now();
  for (std::size_t v = 0; v < block.dim(); ++v) {
    const auto mask = block.mask_column(v);
    if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) {
      throw PreconditionError("insufficient observations in block " + range.label());
    }
  }
  const std::size_t lag = config.lag.value_or(auto_lag(block.length(), block.dim()));
  if (lag < 1 || lag > block.length()) {
    throw PreconditionError("lag " + std::to_string(lag) + " out of range for block " + range.label());
  }

  std::vector<double> scales(block.dim(), 1.0);
  TimeSeries scaled = block;
  if (config.standardize) {
    scales = observed_scales(block);
    for (std::size_t v = 0; v < block.dim(); ++v)
      for (std::size_t t = 0; t < block.length(); ++t)
        if (block.observed(t, v)) scaled.set(t, v, block.value(t, v) / scales[v]);
  }

  const BlockHankel hankel = hankelize(scaled, lag);
  const CompletionResult solved = complete(hankel.data, config.solver);
  const TimeSeries reconstructed = dehankelize(solved.matrix, hankel);

  TimeSeries filled = block;
  for (std::size_t v = 0; v < block.dim(); ++v)
    for (std::size_t t = 0; t < block.length(); ++t)
      if (!block.observed(t, v)) filled.set(t, v, reconstructed.value(t, v) * scales[v]);

  BlockDiagnostics diag;
  diag.range = range;
  diag.lag = lag;
  diag.iterations = solved.iterations;
  diag.residual = solved.residual;
  diag.nuclear_norm = solved.nuclear_norm;
  diag.rank_estimate = solved.rank_estimate;
  diag.converged = solved.converged;
  diag.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {std::move(filled), diag};
}

}  // namespace

std::string BlockRange::label() const {
  return "[" + std::to_string(begin + 1) + ".." + std::to_string(end) + "]";
}

bool ImputeResult::converged() const {
  return std::all_of(per_block.begin(), per_block.end(), [](const BlockDiagnostics& b) { return b.converged; });
}

std::size_t auto_lag(std::size_t length, std::size_t dim) {
  if (length == 0 || dim == 0) throw PreconditionError("auto_lag needs n >= 1 and d >= 1");
  const std::size_t lag = (length + 1 + dim) / (dim + 1);  // ceil((n+1)/(d+1))
  return std::clamp<std::size_t>(lag, 1, length);
}

std::vector<BlockRange> split_blocks(std::size_t length, std::size_t block_size) {
  if (block_size < 1 || block_size > length) {
    throw PreconditionError("block size " + std::to_string(block_size) + " out of range [1, " +
                            std::to_string(length) + "]");
  }
  const std::size_t count = (length + block_size - 1) / block_size;
  const std::size_t base = length / count;
  const std::size_t longer = length % count;  // the first `longer` blocks get one extra step
  std::vector<BlockRange> blocks;
  blocks.reserve(count);
  std::size_t begin = 0;
  for (std::size_t b = 0; b < count; ++b) {
    const std::size_t size = base + (b < longer ? 1 : 0);
    blocks.push_back({begin, begin + size});
    begin += size;
  }
  return blocks;
}

ImputeResult impute_hi(const TimeSeries& series, const HiConfig& config, Execution exec) {
  config.solver.validate();
  const auto blocks = config.block_size ? split_blocks(series.length(), *config.block_size)
                                        : std::vector<BlockRange>{{0, series.length()}};
  if (config.lag) {
    for (const auto& b : blocks) {
      if (*config.lag < 1 || *config.lag > b.size()) {
        throw PreconditionError("lag " + std::to_string(*config.lag) + " out of range for block " + b.label());
      }
    }
  }

  std::vector<std::optional<BlockOutcome>> outcomes(blocks.size());
  std::vector<std::exception_ptr> errors(blocks.size());
  const auto run = [&](std::size_t b) {
    try {
      outcomes[b] = solve_block(series.slice(blocks[b].begin, blocks[b].end), blocks[b], config);
    } catch (...) {
      errors[b] = std::current_exception();
    }
  };
  const auto count = static_cast<std::ptrdiff_t>(blocks.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t b = 0; b < count; ++b) run(static_cast<std::size_t>(b));
  } else {
    for (std::ptrdiff_t b = 0; b < count; ++b) run(static_cast<std::size_t>(b));
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  ImputeResult result{series, {}, "hi"};
  for (std::size_t b = 0; b < blocks.size(); ++b) {
    const auto& filled = outcomes[b]->filled;
    for (std::size_t v = 0; v < series.dim(); ++v)
      for (std::size_t t = 0; t < filled.length(); ++t)
        if (!series.observed(blocks[b].begin + t, v)) result.series.set(blocks[b].begin + t, v, filled.value(t, v));
    result.per_block.push_back(outcomes[b]->diagnostics);
  }
  return result;
}

}  // namespace himpute
