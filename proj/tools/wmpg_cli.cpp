#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "wmpg/errors.hpp"
#include "wmpg/estimator_benchmark.hpp"
#include "wmpg/experiment_spec.hpp"
#include "wmpg/plot.hpp"
#include "wmpg/runner.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitConfig = 2;

struct RunFlags {
  std::string spec_path;
  std::optional<std::string> seeds;
  std::optional<std::size_t> episodes;
  std::optional<std::string> out_dir;
  std::size_t jobs = 1;
  std::vector<std::string> overrides;
};

void add_run_flags(CLI::App& cmd, RunFlags& flags) {
  cmd.add_option("spec", flags.spec_path, "Experiment spec file")->required();
  cmd.add_option("--seeds", flags.seeds, "Seed count (N -> 1..N) or comma-separated seed list");
  cmd.add_option("--episodes", flags.episodes, "Episode budget per seed");
  cmd.add_option("--out-dir", flags.out_dir, "Output directory");
  cmd.add_option("--jobs", flags.jobs, "Concurrent seeds")->check(CLI::PositiveNumber);
  cmd.add_option("--set", flags.overrides, "Extra key=value override (repeatable)");
}

wmpg::ExperimentSpec load_spec(const RunFlags& flags) {
  auto spec = wmpg::ExperimentSpec::load(flags.spec_path);
  if (flags.seeds) spec.seeds = wmpg::parse_seed_list(*flags.seeds);
  if (flags.episodes) spec.episodes = *flags.episodes;
  if (flags.out_dir) spec.output_dir = *flags.out_dir;
  for (const auto& kv : flags.overrides) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw wmpg::ConfigError("--set expects key=value, got '" + kv + "'");
    spec.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  spec.validate();
  return spec;
}

wmpg::RunnerOptions runner_options(std::size_t jobs) {
  wmpg::RunnerOptions options;
  options.jobs = jobs;
  options.on_seed_done = [](const wmpg::RunRecord& r) {
    const auto returns = r.returns();
    double last = 0.0;
    const std::size_t tail = std::min<std::size_t>(20, returns.size());
    for (std::size_t i = returns.size() - tail; i < returns.size(); ++i) last += returns[i];
    if (tail > 0) last /= static_cast<double>(tail);
    if (r.failed)
      std::fprintf(stderr, "seed %llu FAILED: %s\n", static_cast<unsigned long long>(r.seed), r.error.c_str());
    else
      std::printf("seed %llu done: %zu episodes, final trailing mean %.1f, %.1fs\n",
                  static_cast<unsigned long long>(r.seed), returns.size(), last, r.wall_clock_seconds);
    std::fflush(stdout);
  };
  return options;
}

bool any_failed(const std::vector<wmpg::RunRecord>& runs) {
  for (const auto& r : runs)
    if (r.failed) return true;
  return false;
}

int cmd_run(const RunFlags& flags) {
  const auto spec = load_spec(flags);
  const auto runs = wmpg::run_experiment(spec, runner_options(flags.jobs));
  wmpg::emit_plot((std::filesystem::path(spec.output_dir) / "aggregate.csv").string(),
                  (std::filesystem::path(spec.output_dir) / "aggregate.svg").string());
  std::printf("wrote %s\n", spec.output_dir.c_str());
  return any_failed(runs) ? kExitFailed : kExitOk;
}

int cmd_ablate(const RunFlags& flags, const std::string& axis_name, const std::vector<double>& values) {
  const auto spec = load_spec(flags);
  const auto axis = wmpg::ablation_axis_from_string(axis_name);
  const auto results = wmpg::ablation_grid(spec, axis, values, runner_options(flags.jobs));
  bool failed = false;
  for (const auto& r : results) failed = failed || any_failed(r.runs);
  std::printf("wrote %s/ablation.csv\n", spec.output_dir.c_str());
  return failed ? kExitFailed : kExitOk;
}

int cmd_bench(std::size_t instances, std::size_t resamples, std::uint64_t seed, const std::string& csv_path) {
  const auto report = wmpg::estimator_benchmark(instances, resamples, seed);
  std::cout << report.to_table();
  if (!csv_path.empty()) {
    std::ofstream out(csv_path, std::ios::binary);
    if (!out) throw wmpg::ConfigError("cannot write " + csv_path);
    out << report.to_csv();
  }
  const bool unbiased = report.ht_unbiased(3.0);
  const bool zero_var = report.zero_variance_endpoint();
  std::printf("max |z| (ht): %.3f -> %s\n", report.max_ht_z(), unbiased ? "within 3" : "OUTSIDE 3");
  std::printf("k = |A| zero variance: %s\n", zero_var ? "yes" : "NO");
  return unbiased && zero_var ? kExitOk : kExitFailed;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"World-model policy gradient experiments"};
  app.require_subcommand(1);

  RunFlags run_flags;
  auto* run = app.add_subcommand("run", "Train every seed of an experiment spec");
  add_run_flags(*run, run_flags);

  RunFlags ablate_flags;
  std::string axis;
  std::vector<double> values;
  auto* ablate = app.add_subcommand("ablate", "Run one experiment per value of k, h or lambda");
  add_run_flags(*ablate, ablate_flags);
  ablate->add_option("--axis", axis, "k, h or lambda")->required()->check(CLI::IsMember({"k", "h", "lambda"}));
  ablate->add_option("--values", values, "Axis values")->required();

  std::size_t instances = 20;
  std::size_t resamples = 1000000;
  std::uint64_t bench_seed = 1;
  std::string bench_csv;
  auto* bench = app.add_subcommand("bench-estimator", "Resampling bias/variance benchmark of the estimators");
  bench->add_option("--instances", instances, "Random policy/Q instances")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--resamples", resamples, "Draws per (instance, k)")->capture_default_str()->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "Base seed")->capture_default_str();
  bench->add_option("--csv", bench_csv, "Also write the report as CSV");

  std::string plot_input;
  std::string plot_output;
  auto* plot = app.add_subcommand("plot", "Render an aggregate CSV as SVG");
  plot->add_option("aggregate", plot_input, "aggregate.csv")->required();
  plot->add_option("-o,--output", plot_output, "Output SVG")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*run) return cmd_run(run_flags);
    if (*ablate) return cmd_ablate(ablate_flags, axis, values);
    if (*bench) return cmd_bench(instances, resamples, bench_seed, bench_csv);
    if (*plot) {
      wmpg::emit_plot(plot_input, plot_output);
      return kExitOk;
    }
  } catch (const wmpg::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return kExitConfig;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitFailed;
  }
  return kExitOk;
}
