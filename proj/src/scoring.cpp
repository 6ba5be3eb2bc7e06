#include "himpute/scoring.hpp"

#include <algorithm>
#include <cmath>

#include <boost/math/distributions/students_t.hpp>

#include "himpute/error.hpp"

namespace himpute {

Decomposition decompose(std::span<const double> series, const SmoothConfig& config) {
  const std::size_t n = series.size();
  const std::size_t r = config.radius;
  Decomposition out{std::vector<double>(n), std::vector<double>(n)};
  for (std::size_t t = 0; t < n; ++t) {
    const std::size_t lo = t >= r ? t - r : 0;
    const std::size_t hi = std::min(n, t + r + 1);
    double sum = 0.0;
    for (std::size_t s = lo; s < hi; ++s) sum += series[s];
    out.trend[t] = sum / static_cast<double>(hi - lo);
    out.noise[t] = series[t] - out.trend[t];
  }
  return out;
}

ScorePair score(const TimeSeries& truth, const TimeSeries& imputed, const Mask& mask, const SmoothConfig& config) {
  if (truth.length() != imputed.length() || truth.dim() != imputed.dim() || mask.length() != truth.length() ||
      mask.dim() != truth.dim()) {
    throw PreconditionError("truth, imputed series and mask must have the same shape");
  }
  if (!truth.complete() || !imputed.complete()) throw PreconditionError("scored series must be complete");

  ScorePair out;
  double trend_total = 0.0;
  double noise_total = 0.0;
  std::size_t scored_vars = 0;
  for (std::size_t v = 0; v < truth.dim(); ++v) {
    const auto x = truth.column(v);
    const auto y = imputed.column(v);
    std::size_t m = 0;
    for (std::size_t t = 0; t < truth.length(); ++t) {
      if (mask.observed(t, v)) {
        if (x[t] != y[t]) {
          throw PreconditionError("imputed series differs from truth at observed cell t=" + std::to_string(t + 1));
        }
      } else {
        ++m;
      }
    }
    if (m == 0) continue;
    const auto dx = decompose(x, config);
    const auto dy = decompose(y, config);
    double trend_sq = 0.0, noise_x = 0.0, noise_y = 0.0;
    for (std::size_t t = 0; t < truth.length(); ++t) {
      if (mask.observed(t, v)) continue;
      const double diff = dx.trend[t] - dy.trend[t];
      trend_sq += diff * diff;
      noise_x += dx.noise[t] * dx.noise[t];
      noise_y += dy.noise[t] * dy.noise[t];
    }
    const double md = static_cast<double>(m);
    trend_total += std::sqrt(trend_sq / md);
    noise_total += std::abs(std::sqrt(noise_x / md) - std::sqrt(noise_y / md));
    out.n_missing += m;
    ++scored_vars;
  }
  if (scored_vars == 0) throw PreconditionError("no missing cells to score");
  out.trend_score = trend_total / static_cast<double>(scored_vars);
  out.noise_score = noise_total / static_cast<double>(scored_vars);
  return out;
}

double t_quantile_975(std::size_t dof) {
  if (dof < 1) throw PreconditionError("t quantile needs at least one degree of freedom");
  return boost::math::quantile(boost::math::students_t(static_cast<double>(dof)), 0.975);
}

ScoreSummary aggregate(std::span<const ScorePair> scores) {
  if (scores.size() < 2) throw PreconditionError("aggregation needs at least 2 trials");
  const double n = static_cast<double>(scores.size());
  auto mean_and_half = [&](auto field) {
    // Deviations from the first trial keep identical trials exactly at zero
    // spread.
    const double first = field(scores.front());
    double shift = 0.0;
    for (const auto& s : scores) shift += field(s) - first;
    shift /= n;
    double sq = 0.0;
    for (const auto& s : scores) sq += (field(s) - first - shift) * (field(s) - first - shift);
    const double sd = std::sqrt(sq / (n - 1.0));
    return std::pair{first + shift, t_quantile_975(scores.size() - 1) * sd / std::sqrt(n)};
  };
  ScoreSummary out;
  out.trials = scores.size();
  std::tie(out.trend_mean, out.trend_half_width) = mean_and_half([](const ScorePair& s) { return s.trend_score; });
  std::tie(out.noise_mean, out.noise_half_width) = mean_and_half([](const ScorePair& s) { return s.noise_score; });
  return out;
}

}  // namespace himpute
