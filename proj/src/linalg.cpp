#include "himpute/linalg.hpp"

#include <algorithm>

namespace himpute {

namespace {

Eigen::MatrixXd orthonormal_basis(const Eigen::MatrixXd& a) {
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
  return qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), a.cols());
}

}  // namespace

SvdTriplets dense_svd(const Eigen::MatrixXd& a) {
  Eigen::BDCSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return {svd.matrixU(), svd.singularValues(), svd.matrixV()};
}

Eigen::VectorXd singular_values(const Eigen::MatrixXd& a) {
  if (a.size() == 0) return {};
  return Eigen::BDCSVD<Eigen::MatrixXd>(a).singularValues();
}

SvdTriplets leading_singular_triplets(const Eigen::MatrixXd& a, Eigen::Index count,
                                      const Eigen::MatrixXd& warm_start, std::mt19937_64& rng,
                                      int power_iterations, Eigen::Index oversampling) {
  const Eigen::Index full = std::min(a.rows(), a.cols());
  count = std::clamp<Eigen::Index>(count, 1, full);
  const Eigen::Index width = std::min(count + oversampling, full);
  if (width == full) {
    auto svd = dense_svd(a);
    return {svd.u.leftCols(count), svd.s.head(count), svd.v.leftCols(count)};
  }

  Eigen::MatrixXd start(a.cols(), width);
  const Eigen::Index reuse = std::min<Eigen::Index>(warm_start.cols(), width);
  if (reuse > 0) start.leftCols(reuse) = warm_start.leftCols(reuse);
  std::normal_distribution<double> normal;
  for (Eigen::Index j = reuse; j < width; ++j)
    for (Eigen::Index i = 0; i < start.rows(); ++i) start(i, j) = normal(rng);

  Eigen::MatrixXd q = orthonormal_basis(a * start);
  for (int it = 0; it < power_iterations; ++it) {
    q = orthonormal_basis(a * orthonormal_basis(a.transpose() * q));
  }
  const Eigen::MatrixXd projected = q.transpose() * a;  // width x cols
  auto small = dense_svd(projected);
  return {q * small.u.leftCols(count), small.s.head(count), small.v.leftCols(count)};
}

}  // namespace himpute
