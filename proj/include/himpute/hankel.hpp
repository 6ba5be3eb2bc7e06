#pragma once

#include <cstddef>

#include <Eigen/Dense>

#include "himpute/timeseries.hpp"

namespace himpute {

using ObservedSet = Eigen::Array<bool, Eigen::Dynamic, Eigen::Dynamic>;

/// Dense matrix with an observed-entry set. Entries outside the set are NaN
/// and must only be touched through the set.
struct MaskedMatrix {
  Eigen::MatrixXd values;
  ObservedSet observed;

  Eigen::Index rows() const { return values.rows(); }
  Eigen::Index cols() const { return values.cols(); }
  Eigen::Index observed_count() const { return observed.count(); }
};

/// Block-Hankel embedding of a series: row i, block-column j holds x(i+j)
/// as a 1 x d row (0-based), giving an (n-k+1) x (k*d) matrix.
struct BlockHankel {
  MaskedMatrix data;
  std::size_t lag = 0;
  std::size_t length = 0;
  std::size_t dim = 0;
};

BlockHankel hankelize(const TimeSeries& series, std::size_t lag);

/// Maps a (possibly non-Hankel) matrix back to a fully observed series by
/// averaging every entry that represents the same (time, variable) cell.
TimeSeries dehankelize(const Eigen::MatrixXd& completed, const BlockHankel& layout);

/// Number of Hankel rows containing time index t (0-based).
std::size_t hankel_copies(std::size_t t, std::size_t length, std::size_t lag);

}  // namespace himpute
