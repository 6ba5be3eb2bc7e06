#include "himpute/svt.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "himpute/error.hpp"
#include "himpute/linalg.hpp"

namespace himpute {

namespace {

constexpr Eigen::Index kRankStep = 5;
constexpr double kRankTolerance = 1e-6;
// Gram eigenvalues carry absolute error ~ u * sigma_max^2, so singular values
// above tau are accurate to ~ u * sigma_max^2 / tau. Below this ratio fall
// back to a direct SVD.
constexpr double kGramMinRatio = 1e-3;

Shrinkage shrink_triplets(const SvdTriplets& svd, double tau, Eigen::Index cap) {
  Eigen::Index keep = 0;
  while (keep < svd.s.size() && keep < cap && svd.s(keep) > tau) ++keep;
  Shrinkage out;
  out.singular_values = svd.s.head(keep).array() - tau;
  out.matrix = svd.u.leftCols(keep) * out.singular_values.asDiagonal() * svd.v.leftCols(keep).transpose();
  return out;
}

// Dense shrinkage through the eigendecomposition of the Gram matrix on the
// smaller side; only the triplets above tau are formed.
Shrinkage shrink_dense(const Eigen::MatrixXd& y, double tau, Eigen::Index cap) {
  const bool wide = y.cols() > y.rows();
  const Eigen::Index side = wide ? y.rows() : y.cols();
  Eigen::MatrixXd gram = Eigen::MatrixXd::Zero(side, side);
  if (wide) {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(y);
  } else {
    gram.selfadjointView<Eigen::Lower>().rankUpdate(y.transpose());
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram);
  const Eigen::VectorXd& lambda = eig.eigenvalues();  // ascending
  const double sigma_max = std::sqrt(std::max(lambda(side - 1), 0.0));
  if (tau < kGramMinRatio * sigma_max) return shrink_triplets(dense_svd(y), tau, cap);

  Eigen::Index keep = 0;
  while (keep < side && keep < cap && std::sqrt(std::max(lambda(side - 1 - keep), 0.0)) > tau) ++keep;
  Shrinkage out;
  out.singular_values.resize(keep);
  Eigen::MatrixXd basis(side, keep);
  Eigen::VectorXd factor(keep);
  for (Eigen::Index i = 0; i < keep; ++i) {
    const double sigma = std::sqrt(lambda(side - 1 - i));
    out.singular_values(i) = sigma - tau;
    factor(i) = (sigma - tau) / sigma;
    basis.col(i) = eig.eigenvectors().col(side - 1 - i);
  }
  if (wide) {
    out.matrix = basis * factor.asDiagonal() * (basis.transpose() * y);
  } else {
    out.matrix = (y * basis) * factor.asDiagonal() * basis.transpose();
  }
  return out;
}

// Leading-triplet shrinkage: grow the computed rank in steps until the
// smallest computed singular value falls below tau.
class TruncatedShrinker {
 public:
  TruncatedShrinker(Eigen::Index cap) : cap_(cap), rng_(0x5eedu) {}

  Shrinkage operator()(const Eigen::MatrixXd& y, double tau) {
    Eigen::Index count = std::min(rank_ + kRankStep, cap_);
    SvdTriplets svd;
    while (true) {
      svd = leading_singular_triplets(y, count, basis_, rng_);
      if (count >= cap_ || svd.s(svd.s.size() - 1) <= tau) break;
      count = std::min(count + kRankStep, cap_);
    }
    auto out = shrink_triplets(svd, tau, cap_);
    rank_ = out.singular_values.size();
    basis_ = svd.v;
    return out;
  }

 private:
  Eigen::Index cap_;
  Eigen::Index rank_ = 0;
  Eigen::MatrixXd basis_;
  std::mt19937_64 rng_;
};

std::size_t rank_above_tolerance(const Eigen::VectorXd& s) {
  if (s.size() == 0 || s(0) <= 0.0) return 0;
  return static_cast<std::size_t>((s.array() > kRankTolerance * s(0)).count());
}

}  // namespace

void SolverConfig::validate() const {
  if (!(epsilon > 0.0)) throw PreconditionError("epsilon must be > 0");
  if (threshold && !(*threshold > 0.0)) throw PreconditionError("threshold must be > 0");
  if (step_size && !(*step_size > 0.0 && *step_size < 2.0)) throw PreconditionError("step size must lie in (0, 2)");
  if (max_iters < 1) throw PreconditionError("max_iters must be >= 1");
  if (svd_rank_cap && *svd_rank_cap < 1) throw PreconditionError("svd rank cap must be >= 1");
}

double SolverConfig::resolved_threshold(Eigen::Index rows, Eigen::Index cols) const {
  return threshold.value_or(5.0 * std::sqrt(static_cast<double>(rows) * static_cast<double>(cols)));
}

double SolverConfig::resolved_step_size(Eigen::Index rows, Eigen::Index cols, Eigen::Index observed) const {
  if (step_size) return *step_size;
  return std::min(1.9, 1.2 * static_cast<double>(rows) * static_cast<double>(cols) / static_cast<double>(observed));
}

Shrinkage soft_threshold(const Eigen::MatrixXd& a, double tau) {
  return shrink_dense(a, tau, std::min(a.rows(), a.cols()));
}

double nuclear_norm(const Eigen::MatrixXd& a) { return singular_values(a).sum(); }

CompletionResult complete(const MaskedMatrix& input, const SolverConfig& config) {
  config.validate();
  const Eigen::Index rows = input.rows();
  const Eigen::Index cols = input.cols();
  if (rows < 1 || cols < 1) throw PreconditionError("matrix must have at least one row and column");
  if (input.observed.rows() != rows || input.observed.cols() != cols) {
    throw PreconditionError("observed set shape does not match matrix");
  }
  const Eigen::Index observed = input.observed_count();
  if (observed == 0) throw PreconditionError("no observed entries");

  const double tau = config.resolved_threshold(rows, cols);
  const double step = config.resolved_step_size(rows, cols, observed);
  Eigen::Index cap = std::min(rows, cols);
  if (config.svd_rank_cap) cap = std::min<Eigen::Index>(cap, static_cast<Eigen::Index>(*config.svd_rank_cap));
  const bool dense = rows < config.dense_svd_limit && cols < config.dense_svd_limit;

  const Eigen::MatrixXd observed_part = input.observed.select(input.values, 0.0);
  auto residual_of = [&](const Eigen::MatrixXd& x) -> Eigen::MatrixXd {
    return input.observed.select(input.values - x, 0.0);
  };

  CompletionResult result;
  result.matrix = Eigen::MatrixXd::Zero(rows, cols);
  result.residual = observed_part.norm();
  result.iterations = 1;
  if (result.residual <= config.epsilon) {
    result.converged = true;
    return result;
  }

  // While the dual's spectral norm stays <= tau every step proposes X = 0 and
  // adds step * P(M). Jump straight to the first step that yields X != 0.
  double spectral = 0.0;
  if (dense) {
    spectral = singular_values(observed_part)(0);
  } else {
    std::mt19937_64 rng(0x5eedu);
    spectral = leading_singular_triplets(observed_part, 1, Eigen::MatrixXd(), rng).s(0);
  }
  const double zero_steps = std::floor(tau / (step * spectral)) + 1.0;
  if (zero_steps >= config.max_iters) {
    result.iterations = config.max_iters;
    return result;
  }
  result.iterations = static_cast<int>(zero_steps);
  Eigen::MatrixXd dual = (zero_steps * step) * observed_part;

  TruncatedShrinker truncated(cap);
  Eigen::VectorXd shrunk_values;
  while (result.iterations < config.max_iters) {
    ++result.iterations;
    Shrinkage s = dense ? shrink_dense(dual, tau, cap) : truncated(dual, tau);
    result.matrix = std::move(s.matrix);
    shrunk_values = std::move(s.singular_values);
    const Eigen::MatrixXd r = residual_of(result.matrix);
    result.residual = r.norm();
    if (result.residual <= config.epsilon) {
      result.converged = true;
      break;
    }
    dual += step * r;
  }
  result.nuclear_norm = shrunk_values.sum();
  result.rank_estimate = rank_above_tolerance(shrunk_values);
  return result;
}

}  // namespace himpute
