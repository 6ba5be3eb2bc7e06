#include "himpute/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>

#include <boost/math/tools/minima.hpp>

#include "himpute/error.hpp"

namespace himpute {

namespace {

struct Knots {
  std::vector<double> x;
  std::vector<double> y;
};

Knots collect_knots(std::span<const double> values, std::span<const std::uint8_t> observed, std::size_t minimum,
                    std::string_view method) {
  if (values.size() != observed.size()) throw PreconditionError("values and mask lengths differ");
  Knots k;
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (observed[t]) {
      k.x.push_back(static_cast<double>(t));
      k.y.push_back(values[t]);
    }
  }
  if (k.x.size() < minimum) {
    throw PreconditionError(std::string(method) + " imputation needs at least " + std::to_string(minimum) +
                            " observed points, got " + std::to_string(k.x.size()));
  }
  return k;
}

// Fills every missing index with eval(t, segment) where segment is the index
// of the knot interval containing t, or with the boundary rules outside.
template <typename Inside, typename Before, typename After>
std::vector<double> fill_missing(std::span<const double> values, std::span<const std::uint8_t> observed,
                                 const Knots& k, Inside inside, Before before, After after) {
  std::vector<double> out(values.begin(), values.end());
  std::size_t seg = 0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (observed[t]) continue;
    const double x = static_cast<double>(t);
    if (x < k.x.front()) {
      out[t] = before(x);
    } else if (x > k.x.back()) {
      out[t] = after(x);
    } else {
      while (k.x[seg + 1] < x) ++seg;
      out[t] = inside(x, seg);
    }
  }
  return out;
}

// Slopes at the knots per Stineman, computed in range-scaled coordinates and
// returned in data units.
std::vector<double> stineman_slopes(const Knots& k) {
  const std::size_t m = k.x.size();
  const double sx = k.x.back() - k.x.front();
  const auto [ymin, ymax] = std::minmax_element(k.y.begin(), k.y.end());
  double sy = *ymax - *ymin;
  if (sy <= 0.0) sy = 1.0;

  std::vector<double> dx(m - 1), dy(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) {
    dx[i] = (k.x[i + 1] - k.x[i]) / sx;
    dy[i] = (k.y[i + 1] - k.y[i]) / sy;
  }
  std::vector<double> yp(m);
  if (m == 2) {
    yp[0] = yp[1] = dy[0] / dx[0];
  } else {
    for (std::size_t i = 1; i + 1 < m; ++i) {
      const double before = dx[i - 1] * dx[i - 1] + dy[i - 1] * dy[i - 1];
      const double after = dx[i] * dx[i] + dy[i] * dy[i];
      yp[i] = (dy[i - 1] * after + dy[i] * before) / (dx[i - 1] * after + dx[i] * before);
    }
    auto end_slope = [](double secant, double inner) {
      if ((secant >= 0.0 && secant >= inner) || (secant <= 0.0 && secant <= inner)) return 2.0 * secant - inner;
      return secant + std::abs(secant) * (secant - inner) / (std::abs(secant) + std::abs(secant - inner));
    };
    yp[0] = end_slope(dy[0] / dx[0], yp[1]);
    yp[m - 1] = end_slope(dy[m - 2] / dx[m - 2], yp[m - 2]);
  }
  for (auto& s : yp) s *= sy / sx;
  return yp;
}

struct FilterPass {
  std::vector<double> a_pred, p_pred, a_filt, p_filt;
  double sum_scaled_sq = 0.0;  // sum v^2 / F
  double sum_log_f = 0.0;
  std::size_t innovations = 0;
};

// Local-level Kalman filter in units of the observation variance (so the
// state noise is the signal-to-noise ratio q), started diffusely at the
// first observation.
FilterPass run_filter(std::span<const double> values, std::span<const std::uint8_t> observed, std::size_t first,
                      double q) {
  const std::size_t n = values.size();
  FilterPass f;
  f.a_pred.assign(n, 0.0);
  f.p_pred.assign(n, 0.0);
  f.a_filt.assign(n, 0.0);
  f.p_filt.assign(n, 0.0);
  f.a_filt[first] = values[first];
  f.p_filt[first] = 1.0;
  for (std::size_t t = first + 1; t < n; ++t) {
    f.a_pred[t] = f.a_filt[t - 1];
    f.p_pred[t] = f.p_filt[t - 1] + q;
    if (observed[t]) {
      const double F = f.p_pred[t] + 1.0;
      const double v = values[t] - f.a_pred[t];
      f.a_filt[t] = f.a_pred[t] + f.p_pred[t] / F * v;
      f.p_filt[t] = f.p_pred[t] / F;
      f.sum_scaled_sq += v * v / F;
      f.sum_log_f += std::log(F);
      ++f.innovations;
    } else {
      f.a_filt[t] = f.a_pred[t];
      f.p_filt[t] = f.p_pred[t];
    }
  }
  return f;
}

// Negative profile log-likelihood with the observation variance concentrated out.
double profile_nll(const FilterPass& f) {
  const double n = static_cast<double>(f.innovations);
  return 0.5 * (n * std::log(f.sum_scaled_sq / n) + f.sum_log_f);
}

constexpr double kLogRatioLow = -15.0;
constexpr double kLogRatioHigh = 15.0;

}  // namespace

std::string_view to_string(BaselineMethod method) {
  switch (method) {
    case BaselineMethod::linear: return "linear";
    case BaselineMethod::spline: return "spline";
    case BaselineMethod::stine: return "stine";
    case BaselineMethod::kalman: return "kalman";
    case BaselineMethod::ewma: return "ewma";
  }
  return "unknown";
}

std::optional<BaselineMethod> parse_baseline(std::string_view name) {
  for (auto m : {BaselineMethod::linear, BaselineMethod::spline, BaselineMethod::stine, BaselineMethod::kalman,
                 BaselineMethod::ewma}) {
    if (to_string(m) == name) return m;
  }
  return std::nullopt;
}

std::vector<double> impute_linear(std::span<const double> values, std::span<const std::uint8_t> observed) {
  const Knots k = collect_knots(values, observed, 1, "linear");
  return fill_missing(
      values, observed, k,
      [&](double x, std::size_t i) {
        return k.y[i] + (k.y[i + 1] - k.y[i]) * (x - k.x[i]) / (k.x[i + 1] - k.x[i]);
      },
      [&](double) { return k.y.front(); }, [&](double) { return k.y.back(); });
}

std::vector<double> impute_spline(std::span<const double> values, std::span<const std::uint8_t> observed) {
  const Knots k = collect_knots(values, observed, 1, "spline");
  const std::size_t m = k.x.size();
  if (m == 1) {
    return fill_missing(values, observed, k, [&](double, std::size_t) { return k.y[0]; },
                        [&](double) { return k.y[0]; }, [&](double) { return k.y[0]; });
  }

  // Second derivatives with natural end conditions (zero at both ends).
  std::vector<double> h(m - 1);
  for (std::size_t i = 0; i + 1 < m; ++i) h[i] = k.x[i + 1] - k.x[i];
  std::vector<double> second(m, 0.0);
  if (m > 2) {
    const std::size_t inner = m - 2;
    std::vector<double> diag(inner), upper(inner), rhs(inner);
    for (std::size_t r = 0; r < inner; ++r) {
      const std::size_t i = r + 1;
      diag[r] = 2.0 * (h[i - 1] + h[i]);
      upper[r] = h[i];
      rhs[r] = 6.0 * ((k.y[i + 1] - k.y[i]) / h[i] - (k.y[i] - k.y[i - 1]) / h[i - 1]);
    }
    // Thomas algorithm; the sub-diagonal of row r is h[r].
    for (std::size_t r = 1; r < inner; ++r) {
      const double w = h[r] / diag[r - 1];
      diag[r] -= w * upper[r - 1];
      rhs[r] -= w * rhs[r - 1];
    }
    second[inner] = rhs[inner - 1] / diag[inner - 1];
    for (std::size_t r = inner - 1; r-- > 0;) second[r + 1] = (rhs[r] - upper[r] * second[r + 2]) / diag[r];
  }

  const double slope_first = (k.y[1] - k.y[0]) / h[0] - h[0] * (2.0 * second[0] + second[1]) / 6.0;
  const double slope_last =
      (k.y[m - 1] - k.y[m - 2]) / h[m - 2] + h[m - 2] * (second[m - 2] + 2.0 * second[m - 1]) / 6.0;
  return fill_missing(
      values, observed, k,
      [&](double x, std::size_t i) {
        const double a = (k.x[i + 1] - x) / h[i];
        const double b = (x - k.x[i]) / h[i];
        return a * k.y[i] + b * k.y[i + 1] +
               ((a * a * a - a) * second[i] + (b * b * b - b) * second[i + 1]) * h[i] * h[i] / 6.0;
      },
      [&](double x) { return k.y.front() + slope_first * (x - k.x.front()); },
      [&](double x) { return k.y.back() + slope_last * (x - k.x.back()); });
}

std::vector<double> impute_stine(std::span<const double> values, std::span<const std::uint8_t> observed) {
  const Knots k = collect_knots(values, observed, 2, "stine");
  const std::vector<double> yp = stineman_slopes(k);
  return fill_missing(
      values, observed, k,
      [&](double x, std::size_t i) {
        const double width = k.x[i + 1] - k.x[i];
        const double secant = (k.y[i + 1] - k.y[i]) / width;
        const double from_left = x - k.x[i];
        const double from_right = x - k.x[i + 1];
        const double base = k.y[i] + secant * from_left;
        const double dev_left = (yp[i] - secant) * from_left;
        const double dev_right = (yp[i + 1] - secant) * from_right;
        const double product = dev_left * dev_right;
        double y = base;
        if (product > 0.0) y = base + product / (dev_left + dev_right);
        if (product < 0.0) y = base + product * (from_left + from_right) / ((dev_left - dev_right) * width);
        // The rational form can leave the knot range when the end slopes are
        // many times the secant, even with matching signs. Clip in that case.
        if (secant != 0.0 && yp[i] * secant >= 0.0 && yp[i + 1] * secant >= 0.0)
          y = std::clamp(y, std::min(k.y[i], k.y[i + 1]), std::max(k.y[i], k.y[i + 1]));
        return y;
      },
      [&](double) { return k.y.front(); }, [&](double) { return k.y.back(); });
}

std::vector<double> impute_ewma(std::span<const double> values, std::span<const std::uint8_t> observed,
                                std::size_t half_width) {
  collect_knots(values, observed, 1, "ewma");
  if (half_width < 1) throw PreconditionError("ewma half width must be >= 1");
  const std::size_t n = values.size();
  std::vector<double> out(values.begin(), values.end());
  for (std::size_t t = 0; t < n; ++t) {
    if (observed[t]) continue;
    for (std::size_t reach = half_width;; ++reach) {
      double sum = 0.0, weight = 0.0;
      for (std::size_t dist = 1; dist <= reach; ++dist) {
        const double w = std::ldexp(1.0, -static_cast<int>(dist));
        if (dist <= t && observed[t - dist]) {
          sum += w * values[t - dist];
          weight += w;
        }
        if (t + dist < n && observed[t + dist]) {
          sum += w * values[t + dist];
          weight += w;
        }
      }
      if (weight > 0.0) {
        out[t] = sum / weight;
        break;
      }
    }
  }
  return out;
}

LocalLevelFit fit_local_level(std::span<const double> values, std::span<const std::uint8_t> observed) {
  const Knots k = collect_knots(values, observed, 3, "kalman");
  LocalLevelFit fit;
  const auto [lo, hi] = std::minmax_element(k.y.begin(), k.y.end());
  if (*lo == *hi) {
    fit.degenerate = true;
    return fit;
  }
  const auto first = static_cast<std::size_t>(k.x.front());
  auto objective = [&](double log_ratio) { return profile_nll(run_filter(values, observed, first, std::exp(log_ratio))); };
  const auto [best, nll] =
      boost::math::tools::brent_find_minima(objective, kLogRatioLow, kLogRatioHigh, std::numeric_limits<double>::digits / 2);
  const FilterPass f = run_filter(values, observed, first, std::exp(best));
  fit.noise_variance = f.sum_scaled_sq / static_cast<double>(f.innovations);
  fit.level_variance = std::exp(best) * fit.noise_variance;
  fit.log_likelihood = -nll;
  return fit;
}

std::vector<double> impute_kalman(std::span<const double> values, std::span<const std::uint8_t> observed,
                                  LocalLevelFit* fit_out) {
  const LocalLevelFit fit = fit_local_level(values, observed);
  if (fit_out) *fit_out = fit;
  const Knots k = collect_knots(values, observed, 3, "kalman");
  std::vector<double> out(values.begin(), values.end());
  if (fit.degenerate) {
    const double level = k.y.front();
    for (std::size_t t = 0; t < out.size(); ++t)
      if (!observed[t]) out[t] = level;
    return out;
  }

  const auto first = static_cast<std::size_t>(k.x.front());
  const FilterPass f = run_filter(values, observed, first, fit.level_variance / fit.noise_variance);
  const std::size_t n = values.size();
  std::vector<double> smoothed(n);
  smoothed[n - 1] = f.a_filt[n - 1];
  for (std::size_t t = n - 1; t-- > first;) {
    const double gain = f.p_filt[t] / f.p_pred[t + 1];
    smoothed[t] = f.a_filt[t] + gain * (smoothed[t + 1] - f.a_pred[t + 1]);
  }
  for (std::size_t t = 0; t < first; ++t) smoothed[t] = smoothed[first];
  for (std::size_t t = 0; t < n; ++t)
    if (!observed[t]) out[t] = smoothed[t];
  return out;
}

TimeSeries impute_baseline(const TimeSeries& series, BaselineMethod method, Execution exec) {
  const std::size_t d = series.dim();
  std::vector<std::vector<double>> columns(d);
  std::vector<std::exception_ptr> errors(d);
  const auto run = [&](std::size_t v) {
    try {
      const auto values = series.column(v);
      const auto mask = series.mask_column(v);
      switch (method) {
        case BaselineMethod::linear: columns[v] = impute_linear(values, mask); break;
        case BaselineMethod::spline: columns[v] = impute_spline(values, mask); break;
        case BaselineMethod::stine: columns[v] = impute_stine(values, mask); break;
        case BaselineMethod::kalman: columns[v] = impute_kalman(values, mask); break;
        case BaselineMethod::ewma: columns[v] = impute_ewma(values, mask); break;
      }
    } catch (...) {
      errors[v] = std::current_exception();
    }
  };
  const auto count = static_cast<std::ptrdiff_t>(d);
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t v = 0; v < count; ++v) run(static_cast<std::size_t>(v));
  } else {
    for (std::ptrdiff_t v = 0; v < count; ++v) run(static_cast<std::size_t>(v));
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  TimeSeries out = series;
  for (std::size_t v = 0; v < d; ++v)
    for (std::size_t t = 0; t < series.length(); ++t)
      if (!series.observed(t, v)) out.set(t, v, columns[v][t]);
  return out;
}

}  // namespace himpute
