#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "himpute/timeseries.hpp"

namespace himpute {

/// x(t) = A x(t-1) + e(t), e(t) ~ N(0, diag(scale^2)), x(0) = 0.
struct VarModel {
  Eigen::MatrixXd coefficients;
  Eigen::VectorXd innovation_scale;
  std::size_t burn_in = 100;

  /// The 7-dimensional lag-1 model used for the benchmark datasets.
  static VarModel reference_var1();
};

/// x(t) = c1 x(t-1) + c2 x(t-2) + c3 x(t-3) + e(t), zero history.
struct ArModel {
  std::array<double, 3> coefficients{0.1, -0.3, 0.9};
  double innovation_scale = 1.0;
  std::size_t burn_in = 100;

  static ArModel reference_ar3() { return {}; }
};

TimeSeries generate_var1(const VarModel& model, std::size_t length, std::uint64_t seed);
TimeSeries generate_ar3(const ArModel& model, std::size_t length, std::uint64_t seed);

/// Nested uniform missingness: one random permutation of all n*d cells; the
/// mask for level l hides the first round(l/100 * n * d) cells of it.
struct MissingnessPlan {
  std::vector<double> levels;
  std::vector<Mask> masks;
  std::uint64_t seed = 0;
};

/// round-half-up(level / 100 * cells)
std::size_t missing_count(double level, std::size_t cells);

/// Levels must lie in [0, 100).
MissingnessPlan degrade(std::size_t length, std::size_t dim, const std::vector<double>& levels, std::uint64_t seed);

/// Independent stream seed for a (base, a, b) triple via std::seed_seq.
std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b = 0);

}  // namespace himpute
