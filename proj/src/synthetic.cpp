#include "himpute/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "himpute/error.hpp"

namespace himpute {

VarModel VarModel::reference_var1() {
  VarModel m;
  m.coefficients.resize(7, 7);
  m.coefficients << 0.6, 0.22, 0.13, 0.02, 0.05, 0.003, 0.0004,  //
      0.6, 0.12, 0.19, 0.03, 0.03, 0.004, 0.00041,                //
      0.5, 0.15, 0.12, 0.07, 0.04, 0.007, 0.00042,                //
      0.6, 0.13, 0.19, 0.04, 0.03, 0.003, 0.00043,                //
      0.4, 0.122, 0.15, 0.07, 0.02, 0.001, 0.00044,               //
      0.55, 0.162, 0.17, 0.13, 0.03, 0.0045, 0.00045,             //
      0.45, 0.152, 0.12, 0.07, 0.01, 0.0082, 0.00046;
  m.innovation_scale = Eigen::VectorXd::Ones(7);
  return m;
}

TimeSeries generate_var1(const VarModel& model, std::size_t length, std::uint64_t seed) {
  const auto d = model.coefficients.rows();
  if (length < 1) throw PreconditionError("series length must be >= 1");
  if (d < 1 || model.coefficients.cols() != d || model.innovation_scale.size() != d) {
    throw PreconditionError("VAR model needs a square coefficient matrix and one scale per variable");
  }
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXd x = Eigen::VectorXd::Zero(d);
  Eigen::VectorXd e(d);
  std::vector<double> values(length * static_cast<std::size_t>(d));
  for (std::size_t step = 0; step < model.burn_in + length; ++step) {
    for (Eigen::Index v = 0; v < d; ++v) e(v) = model.innovation_scale(v) * normal(rng);
    x = model.coefficients * x + e;
    if (step < model.burn_in) continue;
    const std::size_t t = step - model.burn_in;
    for (Eigen::Index v = 0; v < d; ++v) values[static_cast<std::size_t>(v) * length + t] = x(v);
  }
  return TimeSeries::from_columns(length, static_cast<std::size_t>(d), std::move(values));
}

TimeSeries generate_ar3(const ArModel& model, std::size_t length, std::uint64_t seed) {
  if (length < 1) throw PreconditionError("series length must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  std::array<double, 3> history{0.0, 0.0, 0.0};  // x(t-1), x(t-2), x(t-3)
  std::vector<double> values(length);
  const auto& c = model.coefficients;
  for (std::size_t step = 0; step < model.burn_in + length; ++step) {
    const double x = c[0] * history[0] + c[1] * history[1] + c[2] * history[2] + model.innovation_scale * normal(rng);
    history = {x, history[0], history[1]};
    if (step >= model.burn_in) values[step - model.burn_in] = x;
  }
  return TimeSeries::from_columns(length, 1, std::move(values));
}

std::size_t missing_count(double level, std::size_t cells) {
  return static_cast<std::size_t>(std::floor(static_cast<long double>(level) * cells / 100.0L + 0.5L));
}

MissingnessPlan degrade(std::size_t length, std::size_t dim, const std::vector<double>& levels, std::uint64_t seed) {
  for (double level : levels) {
    if (!(level >= 0.0 && level < 100.0)) throw PreconditionError("missingness level must lie in [0, 100)");
  }
  const std::size_t cells = length * dim;
  std::vector<std::size_t> order(cells);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(seed);
  std::shuffle(order.begin(), order.end(), rng);

  MissingnessPlan plan{levels, {}, seed};
  for (double level : levels) {
    Mask mask(length, dim, true);
    const std::size_t hide = missing_count(level, cells);
    for (std::size_t i = 0; i < hide; ++i) mask.set(order[i] % length, order[i] / length, false);
    plan.masks.push_back(std::move(mask));
  }
  return plan;
}

std::uint64_t derive_seed(std::uint64_t base, std::uint64_t a, std::uint64_t b) {
  auto lo = [](std::uint64_t x) { return static_cast<std::uint32_t>(x); };
  auto hi = [](std::uint64_t x) { return static_cast<std::uint32_t>(x >> 32); };
  std::seed_seq seq{lo(base), hi(base), lo(a), hi(a), lo(b), hi(b)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

}  // namespace himpute
