#include "himpute/hankel.hpp"

#include <algorithm>
#include <limits>
#include <string>

#include "himpute/error.hpp"

namespace himpute {

BlockHankel hankelize(const TimeSeries& series, std::size_t lag) {
  const std::size_t n = series.length();
  const std::size_t d = series.dim();
  if (lag < 1 || lag > n) {
    throw PreconditionError("lag " + std::to_string(lag) + " out of range [1, " + std::to_string(n) + "]");
  }
  const auto rows = static_cast<Eigen::Index>(n - lag + 1);
  const auto cols = static_cast<Eigen::Index>(lag * d);

  BlockHankel h;
  h.lag = lag;
  h.length = n;
  h.dim = d;
  h.data.values.setConstant(rows, cols, std::numeric_limits<double>::quiet_NaN());
  h.data.observed.setConstant(rows, cols, false);
  for (Eigen::Index i = 0; i < rows; ++i) {
    for (std::size_t j = 0; j < lag; ++j) {
      const std::size_t t = static_cast<std::size_t>(i) + j;
      for (std::size_t v = 0; v < d; ++v) {
        if (!series.observed(t, v)) continue;
        const auto c = static_cast<Eigen::Index>(j * d + v);
        h.data.values(i, c) = series.value(t, v);
        h.data.observed(i, c) = true;
      }
    }
  }
  return h;
}

TimeSeries dehankelize(const Eigen::MatrixXd& completed, const BlockHankel& layout) {
  const auto& m = layout.data.values;
  if (completed.rows() != m.rows() || completed.cols() != m.cols()) {
    throw PreconditionError("completed matrix shape does not match the Hankel layout");
  }
  const std::size_t n = layout.length;
  const std::size_t d = layout.dim;
  const std::size_t lag = layout.lag;
  // Average as first copy plus mean deviation from it, so identical copies
  // reproduce their value bit-exactly.
  auto first_copy = [&](std::size_t t, std::size_t v) {
    const std::size_t i = t < lag ? 0 : t - lag + 1;
    return completed(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>((t - i) * d + v));
  };
  std::vector<double> sums(n * d, 0.0);
  std::vector<std::size_t> counts(n, 0);
  for (Eigen::Index i = 0; i < completed.rows(); ++i) {
    for (std::size_t j = 0; j < lag; ++j) {
      const std::size_t t = static_cast<std::size_t>(i) + j;
      ++counts[t];
      for (std::size_t v = 0; v < d; ++v) {
        sums[v * n + t] += completed(i, static_cast<Eigen::Index>(j * d + v)) - first_copy(t, v);
      }
    }
  }
  for (std::size_t v = 0; v < d; ++v)
    for (std::size_t t = 0; t < n; ++t)
      sums[v * n + t] = first_copy(t, v) + sums[v * n + t] / static_cast<double>(counts[t]);
  return TimeSeries::from_columns(n, d, std::move(sums));
}

std::size_t hankel_copies(std::size_t t, std::size_t length, std::size_t lag) {
  return std::min({t + 1, lag, length - lag + 1, length - t});
}

}  // namespace himpute
