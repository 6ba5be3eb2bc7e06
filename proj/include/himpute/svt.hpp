#pragma once

#include <cstddef>
#include <optional>

#include <Eigen/Dense>

#include "himpute/hankel.hpp"

namespace himpute {

/// Singular value thresholding settings. Unset threshold / step size resolve
/// from the matrix shape: threshold = 5 sqrt(rows cols), step =
/// min(1.9, 1.2 rows cols / |observed|).
struct SolverConfig {
  /// Absolute Frobenius tolerance on the observed-entry residual.
  double epsilon = 0.01;
  std::optional<double> threshold;
  std::optional<double> step_size;
  int max_iters = 5000;
  /// Upper bound on singular triplets kept per iteration.
  std::optional<std::size_t> svd_rank_cap;
  /// Matrices with both sides below this use a full dense SVD; larger ones
  /// use warm-started truncated SVD of the leading triplets.
  Eigen::Index dense_svd_limit = 400;

  /// Throws PreconditionError when a field is out of range.
  void validate() const;
  double resolved_threshold(Eigen::Index rows, Eigen::Index cols) const;
  double resolved_step_size(Eigen::Index rows, Eigen::Index cols, Eigen::Index observed) const;
};

struct CompletionResult {
  Eigen::MatrixXd matrix;
  int iterations = 0;
  /// sqrt(sum over observed of (X - M)^2) at the returned iterate.
  double residual = 0.0;
  double nuclear_norm = 0.0;
  /// Singular values above 1e-6 times the largest.
  std::size_t rank_estimate = 0;
  bool converged = false;
};

/// Minimises the nuclear norm subject to the observed-entry residual bound
/// by singular value thresholding. The dual iterate starts at zero; each step
/// shrinks its singular values by the threshold, then adds step * P(M - X)
/// on the observed set. Stops once residual <= epsilon, or after max_iters
/// with converged = false. Throws PreconditionError on an empty observed set.
CompletionResult complete(const MaskedMatrix& input, const SolverConfig& config);

/// Soft-thresholded matrix: same singular vectors, singular values max(s - tau, 0).
struct Shrinkage {
  Eigen::MatrixXd matrix;
  /// Non-zero shrunk singular values, non-increasing.
  Eigen::VectorXd singular_values;
};
Shrinkage soft_threshold(const Eigen::MatrixXd& a, double tau);

double nuclear_norm(const Eigen::MatrixXd& a);

}  // namespace himpute
