#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "himpute/timeseries.hpp"

namespace himpute {

struct SmoothConfig {
  /// Half-width of the centred moving window (window length 2 radius + 1).
  std::size_t radius = 3;
};

struct Decomposition {
  std::vector<double> trend;
  std::vector<double> noise;
};

/// Centred moving average, window truncated at the series ends; noise is the
/// remainder.
Decomposition decompose(std::span<const double> series, const SmoothConfig& config);

struct ScorePair {
  double trend_score = 0.0;
  double noise_score = 0.0;
  std::size_t n_missing = 0;
};

/// Trend score: RMS of trend differences at the scored cells. Noise score:
/// |RMS truth noise - RMS imputed noise| over the same cells. Scored cells
/// are those where `mask` is false; multivariate scores are the mean over
/// variables that have scored cells. Throws PreconditionError on shape
/// mismatch, an empty scored set, or when `imputed` differs from `truth` off
/// the scored set.
ScorePair score(const TimeSeries& truth, const TimeSeries& imputed, const Mask& mask, const SmoothConfig& config);

struct ScoreSummary {
  std::size_t trials = 0;
  double trend_mean = 0.0;
  double trend_half_width = 0.0;
  double noise_mean = 0.0;
  double noise_half_width = 0.0;
};

/// Means with Student-t 95% confidence half-widths; needs >= 2 trials.
ScoreSummary aggregate(std::span<const ScorePair> scores);

/// t quantile at 0.975 with `dof` degrees of freedom.
double t_quantile_975(std::size_t dof);

}  // namespace himpute
