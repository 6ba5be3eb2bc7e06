#include <doctest.h>

#include <Eigen/Eigenvalues>

#include "himpute/error.hpp"
#include "himpute/synthetic.hpp"

using namespace himpute;

namespace {

Eigen::VectorXd root_moduli(const Eigen::MatrixXd& companion) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion, false);
  Eigen::VectorXd m = es.eigenvalues().cwiseAbs();
  std::sort(m.data(), m.data() + m.size(), std::greater<>());
  return m;
}

}  // namespace

TEST_CASE("zero innovations give a zero series") {
  auto var = VarModel::reference_var1();
  var.innovation_scale.setZero();
  auto v = generate_var1(var, 50, 1);
  CHECK(v.length() == 50);
  CHECK(v.dim() == 7);
  CHECK(v.complete());
  for (std::size_t j = 0; j < 7; ++j)
    for (double x : v.column(j)) CHECK(x == 0.0);

  auto ar = ArModel::reference_ar3();
  ar.innovation_scale = 0;
  auto a = generate_ar3(ar, 50, 1);
  for (double x : a.column(0)) CHECK(x == 0.0);
}

TEST_CASE("generators are deterministic per seed") {
  auto var = VarModel::reference_var1();
  CHECK(generate_var1(var, 100, 9) == generate_var1(var, 100, 9));
  CHECK_FALSE(generate_var1(var, 100, 9) == generate_var1(var, 100, 10));
  auto ar = ArModel::reference_ar3();
  CHECK(generate_ar3(ar, 100, 9) == generate_ar3(ar, 100, 9));
  CHECK_FALSE(generate_ar3(ar, 100, 9) == generate_ar3(ar, 100, 10));
}

TEST_CASE("reference VAR(1) is stable") {
  const auto a = VarModel::reference_var1().coefficients;
  REQUIRE(a.rows() == 7);
  REQUIRE(a.cols() == 7);
  CHECK(root_moduli(a)(0) == doctest::Approx(0.98217112).epsilon(1e-7));
}

TEST_CASE("reference AR(3) has a root just outside the unit circle") {
  // Companion matrix of x(t) = 0.1 x(t-1) - 0.3 x(t-2) + 0.9 x(t-3).
  Eigen::Matrix3d c;
  c << 0.1, -0.3, 0.9, 1, 0, 0, 0, 1, 0;
  auto m = root_moduli(c);
  CHECK(m(0) == doctest::Approx(1.00397369).epsilon(1e-7));
  CHECK(m(1) == doctest::Approx(1.00397369).epsilon(1e-7));
  CHECK(m(2) == doctest::Approx(0.89288977).epsilon(1e-7));
  // So the variance keeps growing slowly rather than settling.
  auto x = generate_ar3(ArModel::reference_ar3(), 6000, 2);
  auto rms = [&](std::size_t from, std::size_t to) {
    double s = 0;
    for (std::size_t t = from; t < to; ++t) s += x.value(t, 0) * x.value(t, 0);
    return std::sqrt(s / double(to - from));
  };
  CHECK(rms(5000, 6000) > 2.0 * rms(0, 1000));
}

TEST_CASE("VAR(1) long-run mean is near zero") {
  const std::size_t n = 10000;
  auto x = generate_var1(VarModel::reference_var1(), n, 3);
  for (std::size_t v = 0; v < 7; ++v) {
    auto col = x.column(v);
    double mean = 0;
    for (double c : col) mean += c;
    mean /= double(n);
    double var = 0;
    for (double c : col) var += (c - mean) * (c - mean);
    var /= double(n - 1);
    CHECK(std::isfinite(var));
    // Standard error with the lag-1 autocorrelation taken into account via
    // batch means.
    const std::size_t batches = 20, len = n / batches;
    double bm_var = 0;
    for (std::size_t b = 0; b < batches; ++b) {
      double m = 0;
      for (std::size_t t = b * len; t < (b + 1) * len; ++t) m += col[t];
      m /= double(len);
      bm_var += (m - mean) * (m - mean);
    }
    const double se = std::sqrt(bm_var / double(batches - 1) / double(batches));
    CHECK(std::abs(mean) < 3.0 * se + 1e-12);
  }
}

TEST_CASE("missing counts round half up") {
  CHECK(missing_count(10, 300) == 30);
  CHECK(missing_count(0, 300) == 0);
  CHECK(missing_count(50, 3) == 2);
  CHECK(missing_count(10, 5) == 1);
  CHECK(missing_count(33.3, 10) == 3);
}

TEST_CASE("degrade produces nested masks with exact counts") {
  std::vector<double> levels{10, 20, 30, 40, 50, 60, 70};
  auto plan = degrade(300, 1, levels, 11);
  REQUIRE(plan.masks.size() == levels.size());
  CHECK(plan.masks[0].count_missing() == 30);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    CHECK(plan.masks[i].count_missing() == missing_count(levels[i], 300));
    if (i == 0) continue;
    for (std::size_t t = 0; t < 300; ++t)
      if (!plan.masks[i - 1].observed(t, 0)) CHECK_FALSE(plan.masks[i].observed(t, 0));
  }
  auto again = degrade(300, 1, levels, 11);
  for (std::size_t i = 0; i < levels.size(); ++i) CHECK(again.masks[i] == plan.masks[i]);
  auto other = degrade(300, 1, levels, 12);
  CHECK_FALSE(other.masks[3] == plan.masks[3]);
}

TEST_CASE("degrade is cellwise on multivariate grids") {
  auto plan = degrade(100, 7, {40}, 13);
  CHECK(plan.masks[0].count_missing() == 280);
  std::size_t partial = 0;
  for (std::size_t t = 0; t < 100; ++t) {
    std::size_t miss = 0;
    for (std::size_t v = 0; v < 7; ++v) miss += plan.masks[0].observed(t, v) ? 0 : 1;
    partial += (miss > 0 && miss < 7) ? 1 : 0;
  }
  CHECK(partial > 0);
}

TEST_CASE("degrade rejects bad levels") {
  CHECK_THROWS_AS(degrade(10, 1, {100}, 1), PreconditionError);
  CHECK_THROWS_AS(degrade(10, 1, {-1}, 1), PreconditionError);
  CHECK_NOTHROW(degrade(10, 1, {99.9}, 1));
}

TEST_CASE("derived seeds differ") {
  CHECK(derive_seed(1, 1) == derive_seed(1, 1));
  CHECK(derive_seed(1, 1) != derive_seed(1, 2));
  CHECK(derive_seed(1, 1) != derive_seed(2, 1));
  CHECK(derive_seed(1, 1, 0) != derive_seed(1, 1, 1));
}
