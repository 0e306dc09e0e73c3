#include "wmpg/runner.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "wmpg/csv.hpp"
#include "wmpg/environment.hpp"
#include "wmpg/errors.hpp"
#include "wmpg/plot.hpp"

namespace wmpg {

namespace fs = std::filesystem;

std::vector<double> RunRecord::returns() const {
  std::vector<double> r;
  r.reserve(episodes.size());
  for (const auto& e : episodes) r.push_back(e.episode_return);
  return r;
}

RunRecord run_training(const ExperimentSpec& spec, std::uint64_t seed) {
  RunRecord record;
  record.seed = seed;
  record.config_hash = spec.hash();
  const auto start = std::chrono::steady_clock::now();
  try {
    auto env = make_environment(spec.environment);
    AgentConfig config = spec.agent;
    config.seed = seed;
    Agent agent(config, env->observation_dim(), env->action_count());
    Rng rng(mix_seed(seed, 1));
    record.episodes.reserve(spec.episodes);
    for (std::size_t e = 0; e < spec.episodes; ++e) record.episodes.push_back(agent.run_episode(*env, rng));
  } catch (const std::exception& ex) {
    record.failed = true;
    record.error = ex.what();
  }
  record.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return record;
}

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot write " + path.string());
  out << text;
}

std::string hex64(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

void write_outputs(const ExperimentSpec& spec, const std::vector<RunRecord>& runs) {
  const fs::path dir(spec.output_dir);
  fs::create_directories(dir);
  std::vector<std::vector<double>> curves;
  std::string manifest = "config_hash = " + hex64(spec.hash()) + "\n";
  for (const auto& run : runs) {
    char line[160];
    std::snprintf(line, sizeof line, "seed %llu: %s episodes=%zu wall_clock_s=%.3f",
                  static_cast<unsigned long long>(run.seed), run.failed ? "FAILED" : "ok", run.episodes.size(),
                  run.wall_clock_seconds);
    manifest += line;
    if (run.failed) manifest += " error=\"" + run.error + "\"";
    manifest += '\n';
    write_text(dir / ("seed_" + std::to_string(run.seed) + ".csv"), format_run_csv(run.episodes));
    if (!run.failed) curves.push_back(run.returns());
  }
  manifest += "\n# spec\n" + spec.canonical();
  write_text(dir / "manifest.txt", manifest);
  write_text(dir / "aggregate.csv", format_aggregate_csv(aggregate_returns(curves)));
}

}  // namespace

std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, const RunnerOptions& options) {
  spec.validate();
  std::vector<RunRecord> records(spec.seeds.size());
  std::mutex callback_mutex;
  auto run_one = [&](std::size_t i) {
    records[i] = run_training(spec, spec.seeds[i]);
    if (options.on_seed_done) {
      std::lock_guard lock(callback_mutex);
      options.on_seed_done(records[i]);
    }
  };

  const std::size_t jobs = std::max<std::size_t>(1, std::min(options.jobs, spec.seeds.size()));
  if (jobs == 1) {
    for (std::size_t i = 0; i < records.size(); ++i) run_one(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> workers;
    for (std::size_t w = 0; w < jobs; ++w)
      workers.emplace_back([&] {
        for (std::size_t i = next++; i < records.size(); i = next++) run_one(i);
      });
  }
  if (options.write_files) write_outputs(spec, records);
  return records;
}

AblationAxis ablation_axis_from_string(const std::string& name) {
  if (name == "k") return AblationAxis::K;
  if (name == "h" || name == "horizon") return AblationAxis::Horizon;
  if (name == "lambda") return AblationAxis::Lambda;
  throw ConfigError("ablation axis must be k, h or lambda");
}

std::string to_string(AblationAxis axis) {
  switch (axis) {
    case AblationAxis::K: return "k";
    case AblationAxis::Horizon: return "h";
    case AblationAxis::Lambda: return "lambda";
  }
  return "unknown";
}

namespace {

std::string value_label(AblationAxis axis, double value) {
  if (axis == AblationAxis::Lambda) return format_number(value);
  return std::to_string(static_cast<long long>(value));
}

std::size_t as_count(double value, const char* what) {
  if (!(value >= 1.0) || value != std::floor(value)) throw ConfigError(std::string(what) + " values must be integers >= 1");
  return static_cast<std::size_t>(value);
}

}  // namespace

ExperimentSpec ablation_variant(const ExperimentSpec& base, AblationAxis axis, double value) {
  ExperimentSpec spec = base;
  switch (axis) {
    case AblationAxis::K: spec.agent.estimator.k_strategy = ConstantK{as_count(value, "k")}; break;
    case AblationAxis::Horizon: spec.agent.estimator.horizon = as_count(value, "h"); break;
    case AblationAxis::Lambda:
      if (!(value >= 0.0 && value <= 1.0)) throw ConfigError("lambda values must be in [0, 1]");
      spec.agent.estimator.lambda = value;
      break;
  }
  spec.output_dir = (fs::path(base.output_dir) / (to_string(axis) + "_" + value_label(axis, value))).string();
  spec.validate();
  return spec;
}

std::vector<AblationResult> ablation_grid(const ExperimentSpec& base, AblationAxis axis,
                                          const std::vector<double>& values, const RunnerOptions& options) {
  if (values.empty()) throw ConfigError("ablation needs at least one value");
  std::vector<ExperimentSpec> specs;
  for (double v : values) specs.push_back(ablation_variant(base, axis, v));

  std::vector<AblationResult> results;
  for (std::size_t i = 0; i < values.size(); ++i)
    results.push_back({value_label(axis, values[i]), specs[i], run_experiment(specs[i], options)});

  if (options.write_files) {
    std::string csv = to_string(axis) + "," + std::string(kAggregateCsvHeader) + "\n";
    std::vector<PlotSeries> series;
    for (const auto& r : results) {
      std::vector<std::vector<double>> curves;
      for (const auto& run : r.runs)
        if (!run.failed) curves.push_back(run.returns());
      const auto rows = aggregate_returns(curves);
      const auto agg = format_aggregate_csv(rows);
      // Prefix every data row (skip the header) with the axis value.
      std::size_t pos = agg.find('\n') + 1;
      while (pos < agg.size()) {
        const auto nl = agg.find('\n', pos);
        csv += r.value_label + "," + agg.substr(pos, nl - pos + 1);
        pos = nl + 1;
      }
      if (!rows.empty()) {
        PlotSeries s;
        s.label = to_string(axis) + " = " + r.value_label;
        for (const auto& row : rows) {
          s.x.push_back(static_cast<double>(row.episode));
          s.mean.push_back(row.mean_trailing20);
          s.lower.push_back(row.lower);
          s.upper.push_back(row.upper);
        }
        series.push_back(std::move(s));
      }
    }
    fs::create_directories(base.output_dir);
    write_text(fs::path(base.output_dir) / "ablation.csv", csv);
    if (!series.empty())
      write_text(fs::path(base.output_dir) / "ablation.svg", render_svg(series, "ablation over " + to_string(axis)));
  }
  return results;
}

}  // namespace wmpg
