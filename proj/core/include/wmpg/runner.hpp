#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "wmpg/agent.hpp"
#include "wmpg/experiment_spec.hpp"

namespace wmpg {

struct RunRecord {
  std::uint64_t seed = 0;
  std::uint64_t config_hash = 0;
  std::vector<EpisodeMetrics> episodes;
  double wall_clock_seconds = 0.0;
  bool failed = false;
  std::string error;

  std::vector<double> returns() const;
};

struct RunnerOptions {
  std::size_t jobs = 1;
  bool write_files = true;
  /// Called after each finished seed (from worker threads, serialised by the runner).
  std::function<void(const RunRecord&)> on_seed_done;
};

/// Trains one agent for spec.episodes episodes with the given seed. Exceptions are captured in the record.
RunRecord run_training(const ExperimentSpec& spec, std::uint64_t seed);

/**
 * Runs every seed of the spec on a fixed-size worker pool and returns records
 * in seed-list order. With write_files, writes seed_<s>.csv per seed plus
 * aggregate.csv and manifest.txt into spec.output_dir.
 */
std::vector<RunRecord> run_experiment(const ExperimentSpec& spec, const RunnerOptions& options = {});

enum class AblationAxis { K, Horizon, Lambda };
AblationAxis ablation_axis_from_string(const std::string& name);
std::string to_string(AblationAxis axis);

struct AblationResult {
  std::string value_label;
  ExperimentSpec spec;
  std::vector<RunRecord> runs;
};

/// Applies one axis value to a copy of the spec (output under <output_dir>/<axis>_<value>).
ExperimentSpec ablation_variant(const ExperimentSpec& base, AblationAxis axis, double value);

/// One run_experiment per value, plus ablation.csv and ablation.svg in base.output_dir.
std::vector<AblationResult> ablation_grid(const ExperimentSpec& base, AblationAxis axis,
                                          const std::vector<double>& values, const RunnerOptions& options = {});

}  // namespace wmpg
