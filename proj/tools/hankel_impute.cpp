// Command-line front end: generate, degrade, impute, score and benchmark
// sweeps. Exit codes: 0 success, 1 usage error, 2 data or precondition
// error, 3 solver non-convergence (impute only).

#include <charconv>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "himpute/baselines.hpp"
#include "himpute/error.hpp"
#include "himpute/imputer.hpp"
#include "himpute/scoring.hpp"
#include "himpute/sweep.hpp"
#include "himpute/synthetic.hpp"
#include "himpute/timeseries.hpp"

namespace fs = std::filesystem;
using namespace himpute;

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitData = 2;
constexpr int kExitNotConverged = 3;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string level_name(double level) {
  char buf[32];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, level);
  return std::string(buf, ptr);
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw IoError("error writing " + path.string());
}

std::optional<std::size_t> parse_lag(const std::string& text) {
  if (text == "auto") return std::nullopt;
  std::size_t lag = 0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), lag);
  if (ec != std::errc{} || ptr != text.data() + text.size() || lag == 0) {
    throw UsageError("lag must be a positive integer or 'auto', got '" + text + "'");
  }
  return lag;
}

struct Dataset {
  std::string label;
  TimeSeries series;
  std::size_t default_radius;
};

Dataset load_dataset(const std::string& name, std::size_t n, std::uint64_t data_seed) {
  if (name == "ar3") return {"ar3", generate_ar3(ArModel::reference_ar3(), n, data_seed), 3};
  if (name == "var1") return {"var1", generate_var1(VarModel::reference_var1(), n, data_seed), 7};
  TimeSeries s = read_csv(name);
  if (!s.complete()) throw PreconditionError("benchmark dataset " + name + " must be complete");
  return {fs::path(name).stem().string(), std::move(s), 7};
}

// Flags shared by the sweep subcommands.
struct SweepOptions {
  std::string dataset = "ar3";
  std::size_t n = 300;
  std::uint64_t data_seed = 1;
  std::vector<double> levels{10, 20, 30, 40, 50, 60, 70};
  std::size_t trials = 10;
  std::string lag = "auto";
  double eps = 0.01;
  std::size_t block_size = 0;
  int max_iters = SolverConfig{}.max_iters;
  bool standardize = false;
  std::optional<std::size_t> radius;
  std::uint64_t seed = 1;
  std::string out_dir = ".";
  bool no_timing = false;
  bool serial = false;
};

void add_sweep_options(CLI::App* cmd, SweepOptions& o, bool with_levels) {
  cmd->add_option("--dataset", o.dataset, "ar3, var1 or a complete CSV file")->capture_default_str();
  cmd->add_option("--n", o.n, "length of generated datasets")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--data-seed", o.data_seed, "seed for generated datasets")->capture_default_str();
  if (with_levels) cmd->add_option("--levels", o.levels, "missingness percentages")->delimiter(',')->capture_default_str();
  cmd->add_option("--trials", o.trials, "missingness draws per level")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--eps", o.eps, "solver tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_option("--max-iters", o.max_iters, "solver iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  cmd->add_flag("--standardize", o.standardize, "scale each variable by its observed std-dev before completion");
  cmd->add_option("--radius", o.radius, "trend smoothing radius (default: 3 for ar3, 7 otherwise)");
  cmd->add_option("--seed", o.seed, "base seed for missingness")->capture_default_str();
  cmd->add_option("--out-dir", o.out_dir, "output directory")->capture_default_str();
  cmd->add_flag("--no-timing", o.no_timing, "leave wall-time columns empty");
  cmd->add_flag("--serial", o.serial, "run trials sequentially");
}

HiConfig hi_config(const std::string& lag, double eps, std::size_t block_size, int max_iters, bool standardize) {
  HiConfig c;
  c.lag = parse_lag(lag);
  c.solver.epsilon = eps;
  c.solver.max_iters = max_iters;
  if (block_size > 0) c.block_size = block_size;
  c.standardize = standardize;
  return c;
}

SweepSpec base_spec(const SweepOptions& o) {
  Dataset ds = load_dataset(o.dataset, o.n, o.data_seed);
  SweepSpec spec{ds.label, std::move(ds.series)};
  spec.levels = o.levels;
  spec.trials = o.trials;
  spec.smooth.radius = o.radius.value_or(ds.default_radius);
  spec.seed = o.seed;
  for (double l : spec.levels)
    if (!(l > 0.0 && l < 100.0)) throw UsageError("levels must lie in (0, 100)");
  return spec;
}

void write_sweep(const SweepSpec& spec, const SweepOptions& o, const std::string& prefix) {
  const auto records = run_sweep(spec, o.serial ? Execution::serial : Execution::parallel);
  fs::create_directories(o.out_dir);
  write_text(fs::path(o.out_dir) / (prefix + "results.csv"), format_results_csv(spec, records, !o.no_timing));
  write_text(fs::path(o.out_dir) / (prefix + "summary.csv"), format_summary_csv(spec, records, !o.no_timing));
  std::size_t failed = 0;
  for (const auto& r : records) failed += r.error.empty() ? 0 : 1;
  std::cerr << records.size() << " runs, " << failed << " failed; wrote " << prefix << "results.csv and " << prefix
            << "summary.csv to " << o.out_dir << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Hankel matrix-completion imputation for time series"};
  app.require_subcommand(1);

  // generate
  std::string model, gen_out;
  std::size_t gen_n = 300, burn_in = 100;
  std::uint64_t gen_seed = 1;
  double scale = 1.0;
  auto* generate = app.add_subcommand("generate", "simulate a synthetic dataset");
  generate->add_option("--model", model, "var1 or ar3")->required();
  generate->add_option("--n", gen_n, "series length")->required()->check(CLI::PositiveNumber);
  generate->add_option("--seed", gen_seed, "random seed")->capture_default_str();
  generate->add_option("--burn-in", burn_in, "discarded initial steps")->capture_default_str();
  generate->add_option("--scale", scale, "innovation standard deviation")->capture_default_str();
  generate->add_option("--out", gen_out, "output CSV")->required();

  // degrade
  std::string deg_in, deg_out = ".";
  std::vector<double> deg_levels{10, 20, 30, 40, 50, 60, 70};
  std::uint64_t deg_seed = 1;
  auto* degrade_cmd = app.add_subcommand("degrade", "write nested missingness masks and gappy series");
  degrade_cmd->add_option("--in", deg_in, "complete input CSV")->required();
  degrade_cmd->add_option("--levels", deg_levels, "missing percentages")->delimiter(',')->capture_default_str();
  degrade_cmd->add_option("--seed", deg_seed, "random seed")->capture_default_str();
  degrade_cmd->add_option("--out-dir", deg_out, "output directory")->capture_default_str();

  // impute
  std::string imp_in, imp_out, imp_method = "hi", imp_lag = "auto";
  double imp_eps = 0.01;
  std::size_t imp_block = 0;
  int imp_iters = SolverConfig{}.max_iters;
  bool imp_standardize = false;
  auto* impute = app.add_subcommand("impute", "fill the missing cells of a series");
  impute->add_option("--in", imp_in, "gappy input CSV")->required();
  impute->add_option("--out", imp_out, "completed output CSV")->required();
  impute->add_option("--method", imp_method, "hi, linear, spline, stine, kalman or ewma")->capture_default_str();
  impute->add_option("--lag", imp_lag, "Hankel lag or 'auto'")->capture_default_str();
  impute->add_option("--eps", imp_eps, "solver tolerance")->capture_default_str()->check(CLI::PositiveNumber);
  impute->add_option("--block-size", imp_block, "block length, 0 for a single block")->capture_default_str();
  impute->add_option("--max-iters", imp_iters, "solver iteration cap")->capture_default_str()->check(CLI::PositiveNumber);
  impute->add_flag("--standardize", imp_standardize, "scale each variable by its observed std-dev");

  // score
  std::string sc_truth, sc_imputed, sc_mask, sc_method = "unknown", sc_out;
  double sc_level = 0.0;
  std::size_t sc_radius = 3;
  auto* score_cmd = app.add_subcommand("score", "trend and noise scores of an imputation");
  score_cmd->add_option("--truth", sc_truth, "complete reference CSV")->required();
  score_cmd->add_option("--imputed", sc_imputed, "completed CSV")->required();
  score_cmd->add_option("--mask", sc_mask, "mask CSV (0 = scored cell)")->required();
  score_cmd->add_option("--radius", sc_radius, "trend smoothing radius")->capture_default_str();
  score_cmd->add_option("--method", sc_method, "method label for the output row")->capture_default_str();
  score_cmd->add_option("--level", sc_level, "level label for the output row")->capture_default_str();
  score_cmd->add_option("--out", sc_out, "output CSV (default stdout)");

  // bench
  SweepOptions bench_opts;
  std::vector<std::string> bench_methods{"hi", "linear", "spline", "stine", "kalman", "ewma"};
  auto* bench = app.add_subcommand("bench", "compare HI with the baselines over missingness levels");
  add_sweep_options(bench, bench_opts, true);
  bench->add_option("--methods", bench_methods, "methods to run")->delimiter(',')->capture_default_str();
  bench->add_option("--lag", bench_opts.lag, "Hankel lag or 'auto'")->capture_default_str();
  bench->add_option("--block-size", bench_opts.block_size, "block length, 0 for a single block")->capture_default_str();

  // lag-sweep
  SweepOptions lag_opts;
  lag_opts.levels = {40};
  std::vector<std::string> lags;
  double lag_level = 40;
  auto* lag_sweep = app.add_subcommand("lag-sweep", "HI scores over a list of lags");
  add_sweep_options(lag_sweep, lag_opts, false);
  lag_sweep->add_option("--lags", lags, "lags ('auto' allowed)")->delimiter(',')->required();
  lag_sweep->add_option("--level", lag_level, "missing percentage")->capture_default_str();
  lag_sweep->add_option("--block-size", lag_opts.block_size, "block length, 0 for a single block")->capture_default_str();

  // block-sweep
  SweepOptions block_opts;
  block_opts.n = 208;
  std::vector<std::size_t> block_sizes;
  auto* block_sweep = app.add_subcommand("block-sweep", "HI scores and timing over block sizes");
  add_sweep_options(block_sweep, block_opts, true);
  block_sweep->add_option("--block-sizes", block_sizes, "block lengths")->delimiter(',')->required();
  block_sweep->add_option("--lag", block_opts.lag, "Hankel lag or 'auto'")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*generate) {
      TimeSeries s = [&] {
        if (model == "ar3") {
          ArModel m = ArModel::reference_ar3();
          m.burn_in = burn_in;
          m.innovation_scale = scale;
          return generate_ar3(m, gen_n, gen_seed);
        }
        if (model == "var1") {
          VarModel m = VarModel::reference_var1();
          m.burn_in = burn_in;
          m.innovation_scale.setConstant(scale);
          return generate_var1(m, gen_n, gen_seed);
        }
        throw UsageError("unknown model '" + model + "' (expected var1 or ar3)");
      }();
      write_csv(s, gen_out);
    } else if (*degrade_cmd) {
      const TimeSeries s = read_csv(deg_in);
      for (double l : deg_levels)
        if (!(l >= 0.0 && l < 100.0)) throw UsageError("levels must lie in [0, 100)");
      const auto plan = degrade(s.length(), s.dim(), deg_levels, deg_seed);
      fs::create_directories(deg_out);
      for (std::size_t i = 0; i < plan.levels.size(); ++i) {
        const std::string name = level_name(plan.levels[i]);
        write_mask_csv(plan.masks[i], fs::path(deg_out) / ("mask_" + name + ".csv"));
        write_csv(s.with_mask(plan.masks[i]), fs::path(deg_out) / ("degraded_" + name + ".csv"));
      }
    } else if (*impute) {
      if (!is_known_method(imp_method)) throw UsageError("unknown method '" + imp_method + "'");
      const HiConfig cfg = hi_config(imp_lag, imp_eps, imp_block, imp_iters, imp_standardize);
      const TimeSeries s = read_csv(imp_in);
      const auto start = std::chrono::steady_clock::now();
      ImputeResult diag{s, {}, imp_method};
      const TimeSeries filled = run_method(imp_method, s, cfg, &diag);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
      write_csv(filled, imp_out);
      for (const auto& b : diag.per_block) {
        std::fprintf(stderr, "block %s lag=%zu iterations=%d residual=%.6g rank=%zu %s %.3fs\n",
                     b.range.label().c_str(), b.lag, b.iterations, b.residual, b.rank_estimate,
                     b.converged ? "converged" : "NOT CONVERGED", b.seconds);
      }
      std::fprintf(stderr, "%s: wall time %.3fs\n", imp_method.c_str(), secs);
      if (imp_method == kHiMethod && !diag.converged()) {
        std::fprintf(stderr, "warning: residual tolerance %g not reached within %d iterations\n", imp_eps, imp_iters);
        return kExitNotConverged;
      }
    } else if (*score_cmd) {
      const TimeSeries truth = read_csv(sc_truth);
      const TimeSeries imputed = read_csv(sc_imputed);
      const Mask mask = read_mask_csv(sc_mask);
      const ScorePair s = score(truth, imputed, mask, SmoothConfig{sc_radius});
      char row[128];
      std::snprintf(row, sizeof row, "%.17g,%.17g", s.trend_score, s.noise_score);
      const std::string text =
          "method,level,trend_score,noise_score\n" + sc_method + "," + level_name(sc_level) + "," + row + "\n";
      if (sc_out.empty()) {
        std::cout << text;
      } else {
        write_text(sc_out, text);
      }
    } else if (*bench) {
      for (const auto& m : bench_methods)
        if (!is_known_method(m)) throw UsageError("unknown method '" + m + "'");
      SweepSpec spec = base_spec(bench_opts);
      if (bench_opts.block_size > spec.truth.length()) throw UsageError("block size exceeds series length");
      spec.methods = bench_methods;
      spec.variants = {{"", hi_config(bench_opts.lag, bench_opts.eps, bench_opts.block_size, bench_opts.max_iters,
                                      bench_opts.standardize)}};
      write_sweep(spec, bench_opts, "");
    } else if (*lag_sweep) {
      lag_opts.levels = {lag_level};
      SweepSpec spec = base_spec(lag_opts);
      if (lag_opts.block_size > spec.truth.length()) throw UsageError("block size exceeds series length");
      const std::size_t span = lag_opts.block_size > 0 ? lag_opts.block_size : spec.truth.length();
      spec.methods = {kHiMethod};
      spec.variant_column = "lag";
      for (const auto& text : lags) {
        HiConfig cfg = hi_config(text, lag_opts.eps, lag_opts.block_size, lag_opts.max_iters, lag_opts.standardize);
        if (cfg.lag && *cfg.lag > span) throw UsageError("lag " + text + " exceeds the block length");
        spec.variants.push_back({text, cfg});
      }
      write_sweep(spec, lag_opts, "lag_");
    } else if (*block_sweep) {
      SweepSpec spec = base_spec(block_opts);
      spec.methods = {kHiMethod};
      spec.variant_column = "block_size";
      for (std::size_t b : block_sizes) {
        if (b < 1 || b > spec.truth.length()) throw UsageError("block size " + std::to_string(b) + " out of range");
        HiConfig cfg = hi_config(block_opts.lag, block_opts.eps, b, block_opts.max_iters, block_opts.standardize);
        spec.variants.push_back({std::to_string(b), cfg});
      }
      write_sweep(spec, block_opts, "block_");
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  }
  return 0;
}
