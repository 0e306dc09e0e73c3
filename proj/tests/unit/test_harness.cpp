#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "wmpg/csv.hpp"
#include "wmpg/errors.hpp"
#include "wmpg/estimator_benchmark.hpp"
#include "wmpg/experiment_spec.hpp"
#include "wmpg/plot.hpp"
#include "wmpg/runner.hpp"

namespace fs = std::filesystem;
using namespace wmpg;

namespace {

std::string read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

fs::path scratch_dir(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("wmpg_test_" + name);
  fs::remove_all(dir);
  return dir;
}

ExperimentSpec small_spec(const fs::path& out) {
  ExperimentSpec spec = ExperimentSpec::parse(
      "experiment.agent = wmpg\n"
      "experiment.environment = cartpole\n"
      "experiment.episodes = 6\n"
      "experiment.seeds = 1,2,3\n"
      "estimator.horizon = 3\n");
  spec.output_dir = out.string();
  return spec;
}

double sample_sd(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m += x;
  m /= static_cast<double>(v.size());
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return v.size() > 1 ? std::sqrt(s / static_cast<double>(v.size() - 1)) : 0.0;
}

}  // namespace

TEST(ExperimentSpec, ParsesOverridesAndDefaults) {
  const auto spec = ExperimentSpec::parse(
      "# comment\n"
      "experiment.agent = ac\n"
      "\n"
      "experiment.episodes = 40   # trailing comment\n"
      "experiment.seeds = 3\n"
      "policy.hidden = 16,16\n"
      "agent.batch_size = 8\n");
  EXPECT_EQ(spec.agent.kind, AgentKind::AC);
  EXPECT_EQ(spec.episodes, 40u);
  EXPECT_EQ(spec.seeds, (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(spec.agent.policy.hidden, (std::vector<std::size_t>{16, 16}));
  EXPECT_EQ(spec.agent.batch_size, 8u);
  EXPECT_EQ(spec.agent.value, AgentConfig::ac_cartpole().value);
}

TEST(ExperimentSpec, KeyOrderDoesNotMatter) {
  const auto a = ExperimentSpec::parse("estimator.k = 1\nexperiment.agent = wmpg\nestimator.horizon = 5\n");
  const auto b = ExperimentSpec::parse("experiment.agent = wmpg\nestimator.horizon = 5\nestimator.k = 1\n");
  EXPECT_EQ(a.canonical(), b.canonical());
  EXPECT_EQ(a.hash(), b.hash());
  const auto c = ExperimentSpec::parse("experiment.agent = wmpg\nestimator.horizon = 6\nestimator.k = 1\n");
  EXPECT_NE(a.hash(), c.hash());
}

TEST(ExperimentSpec, CanonicalRoundTrips) {
  auto spec = ExperimentSpec::parse("experiment.agent = mac\nexperiment.seeds = 4,9\nagent.entropy_coefficient = 0.01\n");
  const auto again = ExperimentSpec::parse(spec.canonical());
  EXPECT_EQ(again.canonical(), spec.canonical());
  EXPECT_EQ(again.agent, spec.agent);
  EXPECT_EQ(again.seeds, spec.seeds);
}

TEST(ExperimentSpec, Errors) {
  EXPECT_THROW(ExperimentSpec::parse("estimator.k = 1\nestimator.k = 2\n"), ConfigError);
  EXPECT_THROW(ExperimentSpec::parse("estimator.bogus = 1\n"), ConfigError);
  EXPECT_THROW(ExperimentSpec::parse("estimator.k = two\n"), ConfigError);
  EXPECT_THROW(ExperimentSpec::parse("estimator.k = 3\n"), ConfigError);
  EXPECT_THROW(ExperimentSpec::parse("estimator.lambda = 1.5\n"), ConfigError);
  EXPECT_THROW(ExperimentSpec::parse("no equals sign\n"), ConfigError);
  EXPECT_THROW(ExperimentSpec::parse("experiment.environment = pong\n"), ConfigError);
  EXPECT_THROW(ExperimentSpec::parse("experiment.episodes = 0\n"), ConfigError);
  EXPECT_THROW(ExperimentSpec::load("/nonexistent/spec.conf"), ConfigError);
  try {
    ExperimentSpec::parse("experiment.episodes = 3\nestimator.k = 1\nestimator.k = 1\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
}

TEST(ExperimentSpec, SeedLists) {
  EXPECT_EQ(parse_seed_list("3"), (std::vector<std::uint64_t>{1, 2, 3}));
  EXPECT_EQ(parse_seed_list("7,2, 9"), (std::vector<std::uint64_t>{7, 2, 9}));
  EXPECT_THROW(parse_seed_list(""), ConfigError);
  EXPECT_THROW(parse_seed_list("1,x"), ConfigError);
}

TEST(ExperimentSpec, ShippedConfigsLoad) {
  for (const char* name : {"wmpg_cartpole.conf", "ac_cartpole.conf", "mac_cartpole.conf", "chain_wmpg.conf"}) {
    const auto path = fs::path(WMPG_TEST_DATA_DIR) / ".." / ".." / "configs" / name;
    EXPECT_NO_THROW(ExperimentSpec::load(path.string())) << name;
  }
}

TEST(Csv, RunCsvHasOneRowPerEpisode) {
  std::vector<EpisodeMetrics> eps(1);
  eps[0].episode_return = 17.0;
  const auto text = format_run_csv(eps);
  const auto table = parse_csv(text);
  EXPECT_EQ(table.rows.size(), 1u);
  EXPECT_EQ(table.column_values("return"), std::vector<double>{17.0});
  EXPECT_EQ(text.substr(0, kRunCsvHeader.size()), kRunCsvHeader);
  EXPECT_TRUE(std::isnan(table.column_values("policy_loss")[0]));
}

TEST(Csv, ParseErrorsNameTheLine) {
  try {
    parse_csv("a,b\n1,2\n3,oops\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos) << e.what();
  }
  EXPECT_THROW(parse_csv("a,b\n1\n"), ConfigError);
  EXPECT_THROW(parse_csv("a,b\n1,2\n").column("c"), ConfigError);
}

TEST(Csv, AggregateMatchesIndependentRecompute) {
  Rng rng(3);
  std::uniform_real_distribution<double> u(0.0, 200.0);
  std::vector<std::vector<double>> curves(4, std::vector<double>(30));
  for (auto& c : curves)
    for (auto& v : c) v = u(rng);
  const auto rows = aggregate_returns(curves);
  ASSERT_EQ(rows.size(), 30u);
  std::vector<double> means;
  for (std::size_t e = 0; e < 30; ++e) {
    std::vector<double> col;
    for (const auto& c : curves) col.push_back(c[e]);
    const double m = (col[0] + col[1] + col[2] + col[3]) / 4.0;
    means.push_back(m);
    const double sd = sample_sd(col);
    EXPECT_EQ(rows[e].episode, e + 1);
    EXPECT_NEAR(rows[e].mean, m, 1e-9);
    EXPECT_NEAR(rows[e].sd, sd, 1e-9);
    EXPECT_NEAR(rows[e].lower, m - 2 * sd, 1e-9);
    EXPECT_NEAR(rows[e].upper, m + 2 * sd, 1e-9);
    EXPECT_EQ(rows[e].seeds, 4u);
    const std::size_t lo = e >= 19 ? e - 19 : 0;
    double t = 0.0;
    for (std::size_t i = lo; i <= e; ++i) t += means[i];
    EXPECT_NEAR(rows[e].mean_trailing20, t / static_cast<double>(e - lo + 1), 1e-9);
  }
  const auto table = parse_csv(format_aggregate_csv(rows));
  EXPECT_EQ(table.header.size(), 7u);
  EXPECT_NEAR(table.column_values("mean")[7], rows[7].mean, 1e-9);
  EXPECT_THROW(aggregate_returns({{1.0, 2.0}, {1.0}}), ConfigError);
}

TEST(Csv, SingleSeedHasZeroSpread) {
  const auto rows = aggregate_returns({{5.0, 9.0}});
  EXPECT_EQ(rows[1].sd, 0.0);
  EXPECT_EQ(rows[1].lower, 9.0);
  EXPECT_EQ(rows[1].upper, 9.0);
}

TEST(Csv, EpisodesToThreshold) {
  std::vector<double> r(40, 100.0);
  EXPECT_EQ(episodes_to_threshold(r, 195.0), 0u);
  for (std::size_t i = 10; i < 40; ++i) r[i] = 200.0;
  // Window ending at episode e covers episodes e-19..e; needs at least 19 of 20 at 200 (mean >= 195).
  EXPECT_EQ(episodes_to_threshold(r, 195.0), 29u);
  const std::vector<double> all_high(25, 200.0);
  EXPECT_EQ(episodes_to_threshold(all_high, 195.0), 20u);
  EXPECT_EQ(trailing_mean({1.0, 2.0, 3.0}, 2), (std::vector<double>{1.0, 1.5, 2.5}));
}

TEST(Plot, MatchesGoldenFile) {
  const auto table = parse_csv(
      "episode,mean,sd,lower,upper,mean_trailing20,n_seeds\n"
      "1,10,2,6,14,10,3\n"
      "2,30,5,20,40,20,3\n"
      "3,25,1,23,27,21.6666666667,3\n"
      "4,60,10,40,80,31.25,3\n");
  const auto svg = render_svg({series_from_aggregate(table, "wmpg")}, "golden");
  const auto golden = read_file(fs::path(WMPG_TEST_DATA_DIR) / "golden_plot.svg");
  EXPECT_EQ(svg, golden);
}

TEST(Plot, SinglePointAndDeterminism) {
  const auto table = parse_csv("episode,mean,sd,lower,upper,mean_trailing20,n_seeds\n1,5,0,5,5,5,1\n");
  const auto a = render_svg({series_from_aggregate(table)});
  const auto b = render_svg({series_from_aggregate(table)});
  EXPECT_EQ(a, b);
  EXPECT_EQ(a.rfind("<svg", 0), 0u);
  EXPECT_NE(a.find("</svg>"), std::string::npos);
  EXPECT_EQ(a.find("nan"), std::string::npos);
  EXPECT_THROW(series_from_aggregate(parse_csv("episode,mean\n1,2\n")), ConfigError);
}

TEST(Plot, EmitWritesFile) {
  const auto dir = scratch_dir("plot");
  fs::create_directories(dir);
  {
    std::ofstream out(dir / "aggregate.csv");
    out << "episode,mean,sd,lower,upper,mean_trailing20,n_seeds\n1,1,0,1,1,1,1\n2,3,0,3,3,2,1\n";
  }
  emit_plot((dir / "aggregate.csv").string(), (dir / "out.svg").string());
  EXPECT_EQ(read_file(dir / "out.svg"), render_svg({series_from_aggregate(read_csv((dir / "aggregate.csv").string()))}));
  fs::remove_all(dir);
}

TEST(Runner, RunTrainingRecordsEveryEpisode) {
  auto spec = small_spec(scratch_dir("unused"));
  const auto rec = run_training(spec, 5);
  EXPECT_FALSE(rec.failed) << rec.error;
  EXPECT_EQ(rec.episodes.size(), 6u);
  EXPECT_EQ(rec.returns().size(), 6u);
  EXPECT_EQ(rec.seed, 5u);
  EXPECT_EQ(rec.config_hash, spec.hash());
  for (double r : rec.returns()) EXPECT_GE(r, 1.0);
}

TEST(Runner, SameSeedGivesIdenticalFiles) {
  const auto d1 = scratch_dir("det1");
  const auto d2 = scratch_dir("det2");
  run_experiment(small_spec(d1));
  run_experiment(small_spec(d2));
  for (const char* f : {"seed_1.csv", "seed_2.csv", "seed_3.csv", "aggregate.csv"})
    EXPECT_EQ(read_file(d1 / f), read_file(d2 / f)) << f;
  // Manifests differ only in the output directory line.
  const auto m = read_file(d1 / "manifest.txt");
  EXPECT_NE(m.find("config_hash"), std::string::npos);
  EXPECT_NE(m.find("experiment.output_dir"), std::string::npos);
  fs::remove_all(d1);
  fs::remove_all(d2);
}

TEST(Runner, ConcurrentEqualsSequential) {
  const auto d = scratch_dir("conc");
  RunnerOptions seq;
  seq.write_files = false;
  RunnerOptions par = seq;
  par.jobs = 3;
  std::size_t callbacks = 0;
  par.on_seed_done = [&](const RunRecord&) { ++callbacks; };
  const auto a = run_experiment(small_spec(d), seq);
  const auto b = run_experiment(small_spec(d), par);
  ASSERT_EQ(a.size(), 3u);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_EQ(callbacks, 3u);
  for (std::size_t i = 0; i < 3; ++i) {
    EXPECT_EQ(a[i].seed, b[i].seed);
    EXPECT_EQ(a[i].returns(), b[i].returns());
  }
  EXPECT_FALSE(fs::exists(d));
}

TEST(Runner, FailedSeedIsCapturedNotThrown) {
  auto spec = small_spec(scratch_dir("fail"));
  // An infinite step size drives the value net to non-finite outputs within the first learning phase.
  spec.agent.value.optimizer.learning_rate = std::numeric_limits<double>::infinity();
  const auto rec = run_training(spec, 1);
  EXPECT_TRUE(rec.failed);
  EXPECT_FALSE(rec.error.empty());
}

TEST(Runner, AblationOfOneValueEqualsPlainRun) {
  const auto base_dir = scratch_dir("abl");
  auto spec = small_spec(base_dir);
  RunnerOptions opt;
  opt.write_files = true;
  const auto results = ablation_grid(spec, AblationAxis::K, {1.0}, opt);
  ASSERT_EQ(results.size(), 1u);
  auto plain = spec;
  plain.agent.estimator.k_strategy = ConstantK{1};
  RunnerOptions no_files;
  no_files.write_files = false;
  const auto runs = run_experiment(plain, no_files);
  for (std::size_t i = 0; i < runs.size(); ++i) EXPECT_EQ(results[0].runs[i].returns(), runs[i].returns());
  EXPECT_TRUE(fs::exists(base_dir / "ablation.csv"));
  EXPECT_TRUE(fs::exists(base_dir / "ablation.svg"));
  EXPECT_TRUE(fs::exists(base_dir / "k_1" / "aggregate.csv"));
  const auto table = read_csv((base_dir / "ablation.csv").string());
  EXPECT_EQ(table.header.front(), "k");
  EXPECT_EQ(table.rows.size(), 6u);
  fs::remove_all(base_dir);
}

TEST(Runner, AblationVariants) {
  const auto spec = small_spec("x");
  EXPECT_EQ(ablation_variant(spec, AblationAxis::Horizon, 45).agent.estimator.horizon, 45u);
  EXPECT_EQ(ablation_variant(spec, AblationAxis::Lambda, 0.25).agent.estimator.lambda, 0.25);
  EXPECT_EQ(ablation_variant(spec, AblationAxis::Lambda, 0.25).output_dir, (fs::path("x") / "lambda_0.25").string());
  EXPECT_THROW(ablation_variant(spec, AblationAxis::Horizon, 2.5), ConfigError);
  EXPECT_THROW(ablation_variant(spec, AblationAxis::Lambda, 1.5), ConfigError);
  EXPECT_THROW(ablation_variant(spec, AblationAxis::K, 3), ConfigError);
  EXPECT_EQ(ablation_axis_from_string("horizon"), AblationAxis::Horizon);
  EXPECT_THROW(ablation_axis_from_string("gamma"), ConfigError);
}

TEST(EstimatorBenchmark, EndpointsBehave) {
  const auto report = estimator_benchmark(4, 2000, 7);
  ASSERT_FALSE(report.rows.empty());
  bool saw_k1 = false;
  for (const auto& row : report.rows) {
    if (row.k == 1) {
      saw_k1 = true;
      EXPECT_EQ(row.of(BenchmarkEstimator::WithReplacementMC).variance, row.of(BenchmarkEstimator::HTPlain).variance);
      EXPECT_EQ(row.of(BenchmarkEstimator::WithReplacementMC).max_abs_z, row.of(BenchmarkEstimator::HTPlain).max_abs_z);
    }
    if (row.k == row.action_count) EXPECT_EQ(row.of(BenchmarkEstimator::HTPlain).variance, 0.0);
  }
  EXPECT_TRUE(saw_k1);
  EXPECT_TRUE(report.zero_variance_endpoint());
  const auto csv = parse_csv(report.to_csv());
  EXPECT_EQ(csv.rows.size(), report.rows.size());
  EXPECT_FALSE(report.to_table().empty());
}

TEST(EstimatorBenchmark, SeedDeterminism) {
  EXPECT_EQ(estimator_benchmark(3, 500, 9).to_csv(), estimator_benchmark(3, 500, 9).to_csv());
}
