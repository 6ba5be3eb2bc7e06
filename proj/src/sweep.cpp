#include "himpute/sweep.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <map>
#include <tuple>

#include "himpute/baselines.hpp"
#include "himpute/error.hpp"
#include "himpute/synthetic.hpp"

namespace himpute {

namespace {

std::string number(double value) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, ptr);
}

std::string sanitize(std::string text) {
  std::replace(text.begin(), text.end(), ',', ';');
  std::replace(text.begin(), text.end(), '\n', ' ');
  return text;
}

std::string header_prefix(const SweepSpec& spec) {
  std::string h = "dataset,method,level,";
  if (!spec.variant_column.empty()) h += spec.variant_column + ",";
  return h;
}

}  // namespace

bool is_known_method(const std::string& name) { return name == kHiMethod || parse_baseline(name).has_value(); }

TimeSeries run_method(const std::string& method, const TimeSeries& gappy, const HiConfig& hi,
                      ImputeResult* diagnostics) {
  if (method == kHiMethod) {
    // Trials already run in parallel; solve blocks serially inside them.
    ImputeResult r = impute_hi(gappy, hi, Execution::serial);
    if (diagnostics) *diagnostics = r;
    return std::move(r.series);
  }
  const auto baseline = parse_baseline(method);
  if (!baseline) throw PreconditionError("unknown method '" + method + "'");
  return impute_baseline(gappy, *baseline, Execution::serial);
}

std::vector<TrialRecord> run_sweep(const SweepSpec& spec, Execution exec) {
  if (spec.trials < 1) throw PreconditionError("trials must be >= 1");
  if (spec.methods.empty()) throw PreconditionError("no methods selected");
  if (spec.variants.empty()) throw PreconditionError("no HI configuration given");
  for (const auto& m : spec.methods)
    if (!is_known_method(m)) throw PreconditionError("unknown method '" + m + "'");
  for (double level : spec.levels)
    if (!(level > 0.0 && level < 100.0)) throw PreconditionError("levels must lie in (0, 100)");

  const std::size_t n = spec.truth.length();
  const std::size_t d = spec.truth.dim();
  std::vector<MissingnessPlan> plans;
  plans.reserve(spec.trials);
  for (std::size_t i = 0; i < spec.trials; ++i) plans.push_back(degrade(n, d, spec.levels, derive_seed(spec.seed, i)));

  // Baselines do not depend on the HI variant, so they run once per
  // (level, trial) under the first variant.
  struct Job {
    std::size_t variant, level, trial, method;
  };
  std::vector<Job> jobs;
  for (std::size_t var = 0; var < spec.variants.size(); ++var)
    for (std::size_t l = 0; l < spec.levels.size(); ++l)
      for (std::size_t i = 0; i < spec.trials; ++i)
        for (std::size_t m = 0; m < spec.methods.size(); ++m)
          if (var == 0 || spec.methods[m] == kHiMethod) jobs.push_back({var, l, i, m});

  std::vector<TrialRecord> records(jobs.size());
  const auto run = [&](std::size_t j) {
    const Job& job = jobs[j];
    TrialRecord& rec = records[j];
    rec.method = spec.methods[job.method];
    rec.level = spec.levels[job.level];
    rec.trial = job.trial + 1;
    rec.variant = spec.variants[job.variant].label;
    const Mask& mask = plans[job.trial].masks[job.level];
    const auto start = std::chrono::steady_clock::now();
    try {
      const TimeSeries gappy = spec.truth.with_mask(mask);
      ImputeResult diag{gappy, {}, rec.method};
      const TimeSeries filled = run_method(rec.method, gappy, spec.variants[job.variant].hi, &diag);
      rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      if (rec.method == kHiMethod) rec.converged = diag.converged();
      rec.score = score(spec.truth, filled, mask, spec.smooth);
    } catch (const std::exception& e) {
      rec.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      rec.error = sanitize(e.what());
    }
  };
  const auto count = static_cast<std::ptrdiff_t>(jobs.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 1)
    for (std::ptrdiff_t j = 0; j < count; ++j) run(static_cast<std::size_t>(j));
  } else {
    for (std::ptrdiff_t j = 0; j < count; ++j) run(static_cast<std::size_t>(j));
  }
  return records;
}

std::string format_results_csv(const SweepSpec& spec, const std::vector<TrialRecord>& records, bool timing) {
  std::string out = header_prefix(spec);
  out.insert(out.find("level,") + 6, "trial,");
  out += "trend_score,noise_score,wall_time_s,error\n";
  for (const auto& r : records) {
    out += spec.dataset + "," + r.method + "," + number(r.level) + "," + std::to_string(r.trial) + ",";
    if (!spec.variant_column.empty()) out += r.variant + ",";
    if (r.score) {
      out += number(r.score->trend_score) + "," + number(r.score->noise_score) + ",";
    } else {
      out += ",,";
    }
    if (timing) out += number(r.wall_time_s);
    out += ",";
    if (!r.error.empty()) {
      out += r.error;
    } else if (!r.converged) {
      out += "not converged";
    }
    out += "\n";
  }
  return out;
}

std::string format_summary_csv(const SweepSpec& spec, const std::vector<TrialRecord>& records, bool timing) {
  // Group in first-appearance order of (variant, level, method).
  using Key = std::tuple<std::string, double, std::string>;
  std::vector<Key> order;
  std::map<Key, std::vector<const TrialRecord*>> groups;
  for (const auto& r : records) {
    Key key{r.variant, r.level, r.method};
    auto [it, inserted] = groups.try_emplace(key);
    if (inserted) order.push_back(key);
    it->second.push_back(&r);
  }

  std::string out = header_prefix(spec) + "trials,trend_mean,trend_ci95,noise_mean,noise_ci95,wall_time_mean_s\n";
  for (const auto& key : order) {
    const auto& [variant, level, method] = key;
    std::vector<ScorePair> scores;
    double time_sum = 0.0;
    for (const auto* r : groups[key]) {
      if (r->score) scores.push_back(*r->score);
      time_sum += r->wall_time_s;
    }
    out += spec.dataset + "," + method + "," + number(level) + ",";
    if (!spec.variant_column.empty()) out += variant + ",";
    out += std::to_string(scores.size()) + ",";
    if (scores.size() >= 2) {
      const auto s = aggregate(scores);
      out += number(s.trend_mean) + "," + number(s.trend_half_width) + "," + number(s.noise_mean) + "," +
             number(s.noise_half_width) + ",";
    } else if (scores.size() == 1) {
      out += number(scores[0].trend_score) + ",," + number(scores[0].noise_score) + ",,";
    } else {
      out += ",,,,";
    }
    if (timing) out += number(time_sum / static_cast<double>(groups[key].size()));
    out += "\n";
  }
  return out;
}

}  // namespace himpute
