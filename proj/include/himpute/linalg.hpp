#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Dense>

namespace himpute {

/// Thin SVD factors, singular values in non-increasing order.
struct SvdTriplets {
  Eigen::MatrixXd u;
  Eigen::VectorXd s;
  Eigen::MatrixXd v;
};

/// Full thin SVD (divide and conquer).
SvdTriplets dense_svd(const Eigen::MatrixXd& a);

/// Singular values only.
Eigen::VectorXd singular_values(const Eigen::MatrixXd& a);

/// Leading `count` singular triplets by randomized subspace iteration.
/// `warm_start` (cols x r, may be empty) seeds the first r directions of the
/// start block; the rest are drawn from `rng`.
SvdTriplets leading_singular_triplets(const Eigen::MatrixXd& a, Eigen::Index count,
                                      const Eigen::MatrixXd& warm_start, std::mt19937_64& rng,
                                      int power_iterations = 3, Eigen::Index oversampling = 10);

}  // namespace himpute
