#include <doctest.h>

#include <cmath>
#include <random>

#include "himpute/baselines.hpp"
#include "himpute/error.hpp"

using namespace himpute;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct Gappy {
  std::vector<double> values;
  std::vector<std::uint8_t> observed;
};

// NaN marks a gap.
Gappy gappy(std::initializer_list<double> xs) {
  Gappy g;
  for (double x : xs) {
    g.values.push_back(x);
    g.observed.push_back(std::isnan(x) ? 0 : 1);
  }
  return g;
}

using Univariate = std::vector<double> (*)(std::span<const double>, std::span<const std::uint8_t>);

std::vector<double> ewma_default(std::span<const double> v, std::span<const std::uint8_t> o) {
  return impute_ewma(v, o);
}
std::vector<double> kalman_plain(std::span<const double> v, std::span<const std::uint8_t> o) {
  return impute_kalman(v, o);
}

const std::vector<std::pair<const char*, Univariate>> kAll{{"linear", impute_linear},
                                                            {"spline", impute_spline},
                                                            {"stine", impute_stine},
                                                            {"kalman", kalman_plain},
                                                            {"ewma", ewma_default}};

Gappy random_gappy(std::mt19937_64& rng, std::size_t n, double keep_prob) {
  std::normal_distribution<double> step;
  std::bernoulli_distribution keep(keep_prob);
  Gappy g;
  double x = 0;
  for (std::size_t t = 0; t < n; ++t) {
    x += step(rng);
    g.values.push_back(x + 0.3 * step(rng));
    g.observed.push_back(keep(rng) ? 1 : 0);
  }
  g.observed[0] = g.observed[n / 2] = g.observed[n - 1] = 1;
  return g;
}

}  // namespace

TEST_CASE("method names round trip") {
  for (auto m : {BaselineMethod::linear, BaselineMethod::spline, BaselineMethod::stine, BaselineMethod::kalman,
                 BaselineMethod::ewma})
    CHECK(parse_baseline(to_string(m)) == m);
  CHECK_FALSE(parse_baseline("hi").has_value());
  CHECK_FALSE(parse_baseline("Linear").has_value());
}

TEST_CASE("linear examples") {
  auto a = gappy({1, kNaN, 3});
  CHECK(impute_linear(a.values, a.observed) == std::vector<double>{1, 2, 3});
  auto b = gappy({kNaN, 5, kNaN});
  CHECK(impute_linear(b.values, b.observed) == std::vector<double>{5, 5, 5});
}

TEST_CASE("linear recovers a straight line") {
  std::mt19937_64 rng(1);
  std::vector<double> line(100);
  for (std::size_t t = 0; t < 100; ++t) line[t] = 2.0 * double(t + 1);
  std::vector<std::uint8_t> obs(100, 1);
  std::vector<std::size_t> idx(98);
  std::iota(idx.begin(), idx.end(), 1);
  std::shuffle(idx.begin(), idx.end(), rng);
  for (std::size_t i = 0; i < 50; ++i) obs[idx[i]] = 0;
  auto out = impute_linear(line, obs);
  for (std::size_t t = 0; t < 100; ++t) CHECK(out[t] == doctest::Approx(line[t]).epsilon(1e-15));
}

TEST_CASE("spline examples") {
  auto a = gappy({1, kNaN, 3});
  auto out = impute_spline(a.values, a.observed);
  CHECK(out[1] == doctest::Approx(2.0).epsilon(1e-14));

  // t^2 at t = 1, 3, 5, 7; reference natural spline values from an
  // independent implementation.
  auto q = gappy({1, kNaN, 9, kNaN, 25, kNaN, 49});
  auto s = impute_spline(q.values, q.observed);
  CHECK(s[1] == doctest::Approx(4.4).epsilon(1e-12));
  CHECK(s[3] == doctest::Approx(15.8).epsilon(1e-12));
  CHECK(s[5] == doctest::Approx(36.4).epsilon(1e-12));
  for (std::size_t t : {1, 3, 5}) CHECK(std::abs(s[t] - double((t + 1) * (t + 1))) <= 0.5);

  auto u = gappy({2, kNaN, -1, 5, kNaN, kNaN, kNaN, 0});
  auto su = impute_spline(u.values, u.observed);
  CHECK(su[1] == doctest::Approx(-1.5911016949152543).epsilon(1e-12));
  CHECK(su[4] == doctest::Approx(8.288135593220337).epsilon(1e-12));
  CHECK(su[5] == doctest::Approx(7.686440677966099).epsilon(1e-12));
  CHECK(su[6] == doctest::Approx(4.491525423728812).epsilon(1e-12));

  auto full = gappy({3, 1, 4, 1, 5});
  CHECK(impute_spline(full.values, full.observed) == full.values);
}

TEST_CASE("spline extends the boundary slope") {
  auto g = gappy({kNaN, 1, 3, kNaN});
  auto s = impute_spline(g.values, g.observed);
  CHECK(s[0] == doctest::Approx(-1.0));
  CHECK(s[3] == doctest::Approx(5.0));
  auto one = gappy({kNaN, 7, kNaN});
  CHECK(impute_spline(one.values, one.observed) == std::vector<double>{7, 7, 7});
}

TEST_CASE("stineman examples") {
  auto m = gappy({1, kNaN, 2, kNaN, 3});
  auto s = impute_stine(m.values, m.observed);
  CHECK(s[1] > 1.0);
  CHECK(s[1] < 2.0);
  CHECK(s[3] > 2.0);
  CHECK(s[3] < 3.0);

  auto flat = gappy({0, kNaN, 0});
  CHECK(impute_stine(flat.values, flat.observed)[1] == 0.0);

  auto step = gappy({0, 0, 0, kNaN, 1, 1, 1});
  auto st = impute_stine(step.values, step.observed);
  CHECK(st[3] >= 0.0);
  CHECK(st[3] <= 1.0);

  auto ends = gappy({kNaN, 2, 4, kNaN});
  auto se = impute_stine(ends.values, ends.observed);
  CHECK(se[0] == 2.0);
  CHECK(se[3] == 4.0);
}

TEST_CASE("stineman never overshoots on monotone stretches") {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> inc(0.0, 3.0);
  std::uniform_int_distribution<int> gap(1, 6);
  int checked = 0;
  while (checked < 1000) {
    // Knots with a fixed slope sign so every interior gap sits between
    // same-sign secants.
    const double sign = (rng() & 1) ? 1.0 : -1.0;
    Gappy g;
    double y = inc(rng);
    const int knots = 4 + int(rng() % 5);
    for (int k = 0; k < knots; ++k) {
      g.values.push_back(y);
      g.observed.push_back(1);
      if (k + 1 == knots) break;
      const int len = gap(rng);
      for (int i = 0; i < len; ++i) {
        g.values.push_back(kNaN);
        g.observed.push_back(0);
      }
      y += sign * inc(rng);
    }
    auto out = impute_stine(g.values, g.observed);
    std::size_t left = 0;
    for (std::size_t t = 1; t < out.size(); ++t) {
      if (!g.observed[t]) continue;
      const double lo = std::min(g.values[left], g.values[t]), hi = std::max(g.values[left], g.values[t]);
      for (std::size_t u = left + 1; u < t; ++u) {
        CHECK(out[u] >= lo);
        CHECK(out[u] <= hi);
        ++checked;
      }
      left = t;
    }
  }
}

TEST_CASE("stineman steep neighbours do not pull a flat stretch out of range") {
  // Slopes at t=10 and t=15 are 6 and 11 times the secant between them.
  auto g = gappy({1.0586229, kNaN, kNaN, kNaN, 3.62162218, kNaN, kNaN, kNaN, kNaN, kNaN, 6.44386924, kNaN, kNaN,
                  kNaN, kNaN, 6.56612635, kNaN, 8.51330629, kNaN, kNaN, 9.09396532});
  auto out = impute_stine(g.values, g.observed);
  for (std::size_t t = 11; t < 15; ++t) {
    CHECK(out[t] >= 6.44386924);
    CHECK(out[t] <= 6.56612635);
  }
}

TEST_CASE("kalman examples") {
  auto c = gappy({5, 5, kNaN, 5, 5});
  LocalLevelFit fit;
  auto out = impute_kalman(c.values, c.observed, &fit);
  CHECK(fit.degenerate);
  CHECK(std::abs(out[2] - 5.0) <= 1e-6);

  std::mt19937_64 rng(3);
  auto full = random_gappy(rng, 50, 1.0);
  CHECK(impute_kalman(full.values, full.observed) == full.values);
}

TEST_CASE("kalman fit recovers the generating variances") {
  std::mt19937_64 rng(4);
  std::normal_distribution<double> normal;
  std::vector<double> x(4000);
  double level = 0;
  for (auto& v : x) {
    level += 1.0 * normal(rng);
    v = level + 2.0 * normal(rng);
  }
  std::vector<std::uint8_t> obs(x.size(), 1);
  auto fit = fit_local_level(x, obs);
  CHECK_FALSE(fit.degenerate);
  CHECK(fit.level_variance == doctest::Approx(1.0).epsilon(0.25));
  CHECK(fit.noise_variance == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("kalman beats linear on a noisy random walk") {
  int wins = 0;
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    std::bernoulli_distribution keep(0.7);
    std::vector<double> level(200), y(200);
    std::vector<std::uint8_t> obs(200);
    double l = 0;
    for (std::size_t t = 0; t < 200; ++t) {
      l += normal(rng);
      level[t] = l;
      y[t] = l + normal(rng);
      obs[t] = keep(rng) ? 1 : 0;
    }
    auto kal = impute_kalman(y, obs);
    auto lin = impute_linear(y, obs);
    double ek = 0, el = 0;
    for (std::size_t t = 0; t < 200; ++t)
      if (!obs[t]) {
        ek += (kal[t] - level[t]) * (kal[t] - level[t]);
        el += (lin[t] - level[t]) * (lin[t] - level[t]);
      }
    wins += ek < el ? 1 : 0;
  }
  CHECK(wins >= 6);
}

TEST_CASE("ewma examples") {
  auto a = gappy({2, kNaN, 4});
  CHECK(impute_ewma(a.values, a.observed)[1] == doctest::Approx(3.0));
  auto b = gappy({2, kNaN, kNaN});
  auto ob = impute_ewma(b.values, b.observed);
  CHECK(ob[1] == 2.0);
  CHECK(ob[2] == 2.0);
  auto c = gappy({8, kNaN, 2, 2});
  // (8 * 0.5 + 2 * 0.5 + 2 * 0.25) / 1.25 = 5.5 / 1.25
  CHECK(impute_ewma(c.values, c.observed, 4)[1] == doctest::Approx(4.4).epsilon(1e-14));
}

TEST_CASE("ewma matches a brute-force weighting") {
  std::mt19937_64 rng(5);
  for (int rep = 0; rep < 200; ++rep) {
    auto g = random_gappy(rng, 30, 0.3);
    const std::size_t w = 1 + rng() % 5;
    auto out = impute_ewma(g.values, g.observed, w);
    for (std::size_t t = 0; t < 30; ++t) {
      if (g.observed[t]) continue;
      std::size_t reach = w;
      double num = 0, den = 0;
      while (den == 0) {
        for (std::size_t u = 0; u < 30; ++u) {
          const std::size_t dist = u > t ? u - t : t - u;
          if (!g.observed[u] || dist > reach) continue;
          num += std::ldexp(g.values[u], -int(dist));
          den += std::ldexp(1.0, -int(dist));
        }
        ++reach;
      }
      CHECK(out[t] == doctest::Approx(num / den).epsilon(1e-13));
    }
  }
}

TEST_CASE("all methods preserve observed cells") {
  std::mt19937_64 rng(6);
  for (int rep = 0; rep < 20; ++rep) {
    auto g = random_gappy(rng, 60, 0.6);
    for (const auto& [name, fn] : kAll) {
      CAPTURE(name);
      auto out = fn(g.values, g.observed);
      REQUIRE(out.size() == g.values.size());
      for (std::size_t t = 0; t < out.size(); ++t) {
        CHECK(std::isfinite(out[t]));
        if (g.observed[t]) CHECK(out[t] == g.values[t]);
      }
    }
  }
}

TEST_CASE("affine invariance") {
  std::mt19937_64 rng(7);
  const double a = -2.5, c = 11.0;
  for (int rep = 0; rep < 10; ++rep) {
    auto g = random_gappy(rng, 80, 0.6);
    std::vector<double> moved(g.values.size());
    for (std::size_t t = 0; t < moved.size(); ++t) moved[t] = a * g.values[t] + c;
    for (const auto& [name, fn] : kAll) {
      CAPTURE(name);
      auto base = fn(g.values, g.observed);
      auto shifted = fn(moved, g.observed);
      const double rel = std::string_view(name) == "kalman" ? 1e-4 : 1e-10;
      double scale = 0;
      for (double x : base) scale = std::max(scale, std::abs(a * x + c));
      for (std::size_t t = 0; t < base.size(); ++t)
        CHECK(std::abs(shifted[t] - (a * base[t] + c)) <= rel * scale);
    }
  }
}

TEST_CASE("too few observations") {
  auto none = gappy({kNaN, kNaN, kNaN});
  auto one = gappy({kNaN, 1, kNaN});
  auto two = gappy({1, kNaN, 2});
  for (const auto& [name, fn] : kAll) {
    CAPTURE(name);
    CHECK_THROWS_AS(fn(none.values, none.observed), PreconditionError);
  }
  CHECK_THROWS_AS(impute_stine(one.values, one.observed), PreconditionError);
  CHECK_THROWS_AS(impute_kalman(two.values, two.observed), PreconditionError);
  CHECK_THROWS_AS(impute_ewma(two.values, two.observed, 0), PreconditionError);
  std::vector<std::uint8_t> short_mask{1, 1};
  CHECK_THROWS_AS(impute_linear(two.values, short_mask), PreconditionError);
}

TEST_CASE("multivariate dispatch matches per-variable calls") {
  std::mt19937_64 rng(8);
  const std::size_t n = 40, d = 3;
  TimeSeries series(n, d);
  std::vector<Gappy> cols;
  for (std::size_t v = 0; v < d; ++v) {
    cols.push_back(random_gappy(rng, n, 0.7));
    for (std::size_t t = 0; t < n; ++t)
      if (cols[v].observed[t]) series.set(t, v, cols[v].values[t]);
  }
  for (auto m : {BaselineMethod::linear, BaselineMethod::spline, BaselineMethod::stine, BaselineMethod::kalman,
                 BaselineMethod::ewma}) {
    auto par = impute_baseline(series, m, Execution::parallel);
    auto ser = impute_baseline(series, m, Execution::serial);
    CHECK(par.complete());
    for (std::size_t v = 0; v < d; ++v) {
      std::vector<double> expected;
      switch (m) {
        case BaselineMethod::linear: expected = impute_linear(series.column(v), series.mask_column(v)); break;
        case BaselineMethod::spline: expected = impute_spline(series.column(v), series.mask_column(v)); break;
        case BaselineMethod::stine: expected = impute_stine(series.column(v), series.mask_column(v)); break;
        case BaselineMethod::kalman: expected = impute_kalman(series.column(v), series.mask_column(v)); break;
        case BaselineMethod::ewma: expected = impute_ewma(series.column(v), series.mask_column(v)); break;
      }
      for (std::size_t t = 0; t < n; ++t) {
        CHECK(par.value(t, v) == expected[t]);
        CHECK(ser.value(t, v) == expected[t]);
      }
    }
  }
}
