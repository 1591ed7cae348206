#include <gtest/gtest.h>

#include <cmath>
#include <cstdlib>
#include <map>
#include <regex>

#include "bandit_lab/errors.hpp"
#include "bandit_lab/experiment.hpp"
#include "support/test_util.hpp"

using namespace bandit_lab;
namespace fs = std::filesystem;

namespace {

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.name = "tiny";
  cfg.S = 4;
  cfg.K = 4;
  cfg.G = 2;
  cfg.N = 5;
  cfg.J = 20;
  cfg.rate_schedule = RateSchedule({{1, 0.5}, {11, 1.0}});
  cfg.agent_kinds = {AgentKind::kPerfect, AgentKind::kCommRKL, AgentKind::kCommFKL, AgentKind::kClusterRKL,
                     AgentKind::kClusterFKL};
  cfg.seeds = {1, 2, 3};
  cfg.mc_samples = 128;
  return cfg;
}

const char* kMinimalJson = R"({"S": 4, "K": 4, "N": 2, "J": 3, "rate_schedule": 1, "agent_kinds": ["perfect"], "seeds": [1]})";

std::string with(const std::string& base, const std::string& key, const std::string& value) {
  // Replace or append one top-level key in the minimal document.
  const std::regex re("\"" + key + "\": [^,}]+");
  if (std::regex_search(base, re)) return std::regex_replace(base, re, "\"" + key + "\": " + value);
  return base.substr(0, base.size() - 1) + ", \"" + key + "\": " + value + "}";
}

void expect_config_error(const std::string& json, const std::string& field) {
  try {
    parse_config(json);
    ADD_FAILURE() << "no error for " << json;
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("'" + field + "'"), std::string::npos) << e.what();
  }
}

class ScopedEnv {
 public:
  ScopedEnv(const char* name, const char* value) : name_(name) {
    if (const char* old = std::getenv(name)) old_ = old;
    if (value) ::setenv(name, value, 1);
    else ::unsetenv(name);
  }
  ~ScopedEnv() {
    if (old_) ::setenv(name_, old_->c_str(), 1);
    else ::unsetenv(name_);
  }

 private:
  const char* name_;
  std::optional<std::string> old_;
};

}  // namespace

TEST(SystemRegretBound, ReferenceValues) {
  const double small = system_regret_bound(1, 1, 1, 1);
  EXPECT_NEAR(small, 7.65685424949238019520675489684, 7.65685 * 5e-6);
  EXPECT_NEAR(small, 2.0 + 4.0 * std::sqrt(2.0), 1e-12);
  const double big = system_regret_bound(16, 16, 50, 20000);
  EXPECT_NEAR(big / 527177.621202469401844533919003, 1.0, 5e-7);
  EXPECT_THROW(system_regret_bound(1, 1, 1, 0), DomainError);
}

TEST(SystemRegretBound, MonotoneInEachArgument) {
  const long long base[4] = {4, 3, 5, 100};
  const double b0 = system_regret_bound(base[0], base[1], base[2], base[3]);
  for (int i = 0; i < 4; ++i) {
    long long v[4] = {base[0], base[1], base[2], base[3]};
    v[i] *= 2;
    EXPECT_GT(system_regret_bound(v[0], v[1], v[2], v[3]), b0) << i;
  }
}

TEST(SublinearityVerdict, Examples) {
  const auto zeros = RegretTrace::from_per_round(std::vector<double>(40, 0.0), 5);
  const auto v0 = sublinearity_verdict(zeros, 5);
  EXPECT_TRUE(v0.sublinear);
  EXPECT_STREQ(v0.label(), "sublinear-consistent");
  const auto flat = RegretTrace::from_per_round(std::vector<double>(40, 0.3), 5);
  const auto v1 = sublinearity_verdict(flat, 5);
  EXPECT_FALSE(v1.sublinear);
  EXPECT_DOUBLE_EQ(v1.q1, 0.3);
  EXPECT_DOUBLE_EQ(v1.q4, 0.3);
  EXPECT_STREQ(v1.label(), "linear-consistent");
  EXPECT_THROW(sublinearity_verdict(RegretTrace::from_per_round(std::vector<double>(19, 0.0), 5), 5), DomainError);

  std::vector<double> decaying(400);
  for (std::size_t t = 0; t < decaying.size(); ++t) decaying[t] = 0.5 / (1.0 + 0.1 * t);
  EXPECT_TRUE(sublinearity_verdict(RegretTrace::from_per_round(decaying, 10), 10).sublinear);
}

TEST(RegretTrace, CumulativeAndSmoothing) {
  const auto tr = RegretTrace::from_per_round({0.4, 0.2, 0.0, 0.6}, 2);
  EXPECT_EQ(tr.cumulative, (std::vector<double>{0.4, 0.6000000000000001, 0.6000000000000001, 1.2000000000000002}));
  EXPECT_DOUBLE_EQ(tr.smoothed[0], 0.4);
  EXPECT_DOUBLE_EQ(tr.smoothed[1], 0.3);
  EXPECT_DOUBLE_EQ(tr.smoothed[2], 0.1);
  EXPECT_DOUBLE_EQ(tr.smoothed[3], 0.3);
}

TEST(ParseConfig, MinimalAndDefaults) {
  const auto cfg = parse_config(kMinimalJson);
  EXPECT_EQ(cfg.S, 4);
  EXPECT_EQ(cfg.G, 1);
  EXPECT_EQ(cfg.mc_samples, kDefaultMcSamples);
  EXPECT_EQ(cfg.cluster_bits, ClusterBitsMode::kFloorBudget);
  EXPECT_EQ(cfg.rate_schedule.budget_at(5), 1.0);
  EXPECT_EQ(parse_config(config_to_json(cfg)).seeds, cfg.seeds);

  const auto sched = parse_config(
      with(kMinimalJson, "rate_schedule", R"([{"start_round": 1, "rate_bits": 2}, {"start_round": 201, "rate_bits": 3}])"));
  EXPECT_EQ(sched.rate_schedule.budget_at(201), 3.0);
  EXPECT_EQ(parse_config(with(kMinimalJson, "cluster_bits", "\"ceil_target\"")).cluster_bits,
            ClusterBitsMode::kCeilTargetRate);
}

TEST(ParseConfig, FieldLevelErrors) {
  expect_config_error(with(kMinimalJson, "bogus", "1"), "bogus");
  expect_config_error(R"({"K": 4, "N": 2, "J": 3, "rate_schedule": 1, "agent_kinds": ["perfect"], "seeds": [1]})", "S");
  expect_config_error(with(kMinimalJson, "N", "0"), "N");
  expect_config_error(with(kMinimalJson, "J", "1.5"), "J");
  expect_config_error(with(kMinimalJson, "K", "1"), "G");
  expect_config_error(with(kMinimalJson, "seeds", "[]"), "seeds");
  expect_config_error(with(kMinimalJson, "seeds", "[3, 3]"), "seeds");
  expect_config_error(with(kMinimalJson, "agent_kinds", R"(["perfect", "warp"])"), "agent_kinds");
  expect_config_error(with(kMinimalJson, "rate_schedule", "-1"), "rate_schedule");
  expect_config_error(with(kMinimalJson, "rate_schedule", R"([{"start_round": 2, "rate_bits": 1}])"), "rate_schedule");
  expect_config_error(with(kMinimalJson, "epsilon_floor", "0.25"), "epsilon_floor");
  expect_config_error(with(kMinimalJson, "cluster_bits", "\"round\""), "cluster_bits");
  EXPECT_THROW(parse_config("{not json"), ConfigError);
  EXPECT_THROW(parse_config("[1, 2]"), ConfigError);
  EXPECT_THROW(load_config("/nonexistent/config.json"), IoError);
}

TEST(ParseConfig, ShippedConfigsLoad) {
  for (const char* name : {"exp-A", "exp-B-text", "exp-B-caption", "exp-C", "desk-threshold-above",
                           "desk-threshold-below", "smoke"}) {
    const auto cfg = load_config(fs::path(BANDIT_LAB_CONFIG_DIR) / (std::string(name) + ".json"));
    EXPECT_EQ(cfg.name, name);
  }
  const auto a = load_config(fs::path(BANDIT_LAB_CONFIG_DIR) / "exp-A.json");
  EXPECT_EQ(a.S, 16);
  EXPECT_EQ(a.G, 8);
  EXPECT_EQ(a.N, 50);
  EXPECT_EQ(a.J, 400);
  EXPECT_EQ(a.seeds.size(), 5u);
  const auto text = load_config(fs::path(BANDIT_LAB_CONFIG_DIR) / "exp-B-text.json");
  EXPECT_EQ(text.rate_schedule.budget_at(200), 2.0);
  EXPECT_EQ(text.rate_schedule.budget_at(201), 3.0);
  const auto caption = load_config(fs::path(BANDIT_LAB_CONFIG_DIR) / "exp-B-caption.json");
  EXPECT_EQ(caption.rate_schedule.budget_at(200), 1.0);
  EXPECT_EQ(load_config(fs::path(BANDIT_LAB_CONFIG_DIR) / "exp-C.json").cluster_bits, ClusterBitsMode::kCeilTargetRate);
}

TEST(SeedOffset, EnvironmentVariable) {
  {
    ScopedEnv env(kSeedOffsetEnvVar, nullptr);
    EXPECT_EQ(seed_offset_from_env(), 0u);
  }
  {
    ScopedEnv env(kSeedOffsetEnvVar, "1000");
    EXPECT_EQ(seed_offset_from_env(), 1000u);
    auto cfg = parse_config(with(kMinimalJson, "seeds", "[1, 5]"));
    apply_seed_offset(cfg, seed_offset_from_env());
    EXPECT_EQ(cfg.seeds, (std::vector<std::uint64_t>{1001, 1005}));
  }
  {
    ScopedEnv env(kSeedOffsetEnvVar, "");
    EXPECT_EQ(seed_offset_from_env(), 0u);
  }
  for (const char* bad : {"abc", "-3", "12x", "99999999999999999999999"}) {
    ScopedEnv env(kSeedOffsetEnvVar, bad);
    EXPECT_THROW(seed_offset_from_env(), ConfigError) << bad;
  }
}

TEST(RunExperiment, SingleRound) {
  auto cfg = parse_config(R"({"S": 4, "K": 4, "N": 7, "J": 1, "rate_schedule": 1, "agent_kinds": ["perfect"], "seeds": [3]})");
  const auto result = run_experiment(cfg);
  ASSERT_EQ(result.runs.size(), 1u);
  const auto& run = result.runs[0];
  EXPECT_EQ(run.rounds.size(), 1u);
  EXPECT_EQ(run.regret.per_virtual_round.size(), 7u);
  EXPECT_EQ(run.rate.per_round_target.size(), 1u);
  EXPECT_FALSE(run.verdict.has_value());
  const auto rows = test_util::parse_csv(transcript_csv(run));
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0], (std::vector<std::string>{"round", "kind", "target_rate_bits", "used_rate_bits", "budget_bits",
                                               "distortion_nats", "codebook_retx", "sum_regret_round"}));
  EXPECT_EQ(rows[1][0], "1");
  EXPECT_EQ(rows[1][1], "perfect");
  const auto summary = test_util::parse_csv(summary_csv(result));
  EXPECT_EQ(summary[1][5], "too-short");
}

TEST(RunExperiment, TracesAndInvariants) {
  const auto cfg = small_config();
  const auto result = run_experiment(cfg);
  ASSERT_EQ(result.runs.size(), cfg.agent_kinds.size() * cfg.seeds.size());
  for (const auto& run : result.runs) {
    EXPECT_EQ(run.regret.per_virtual_round.size(), static_cast<std::size_t>(cfg.N * cfg.J));
    EXPECT_EQ(run.rate.per_round_target.size(), static_cast<std::size_t>(cfg.J));
    EXPECT_EQ(run.rate.per_round_budget.size(), static_cast<std::size_t>(cfg.J));
    ASSERT_TRUE(run.verdict.has_value());
    double prev = 0.0;
    for (std::size_t t = 0; t < run.regret.per_virtual_round.size(); ++t) {
      const double r = run.regret.per_virtual_round[t];
      EXPECT_GE(r, 0.0);
      EXPECT_LE(r, 1.0);
      EXPECT_GE(run.regret.cumulative[t], prev);
      prev = run.regret.cumulative[t];
      if (run.kind == AgentKind::kPerfect) {
        const auto T = static_cast<long long>(t + 1);
        EXPECT_LE(run.regret.cumulative[t], std::min(system_regret_bound(cfg.S, cfg.K, cfg.N, T), 0.8 * T));
      }
    }
    for (const auto& rec : run.rounds) {
      if (is_comm(run.kind)) EXPECT_LE(rec.used_rate_bits, rec.budget_bits + 1e-6);
      if (is_cluster(run.kind)) EXPECT_EQ(rec.used_rate_bits, std::floor(rec.budget_bits));
    }
  }
  // Paired seeds: every kind faces the same environment.
  EXPECT_EQ(result.run(AgentKind::kPerfect, 2).rate.per_round_budget.size(), 20u);
  EXPECT_THROW(result.run(AgentKind::kPerfect, 99), DomainError);
  EXPECT_EQ(result.runs_of(AgentKind::kCommFKL).size(), 3u);
}

TEST(RunExperiment, ByteIdenticalAcrossRerunsAndWorkerCounts) {
  const auto cfg = small_config();
  test_util::TempDir a("rerun_a"), b("rerun_b");
  const auto files_a = write_outputs(run_experiment(cfg, 1), a.path());
  const auto files_b = write_outputs(run_experiment(cfg, 3), b.path());
  ASSERT_EQ(files_a.size(), files_b.size());
  ASSERT_EQ(files_a.size(), 5u * 3u + 2u * 3u + 2u);
  for (std::size_t i = 0; i < files_a.size(); ++i) {
    EXPECT_EQ(files_a[i].filename(), files_b[i].filename());
    EXPECT_EQ(test_util::read_file(files_a[i]), test_util::read_file(files_b[i])) << files_a[i];
  }
}

TEST(RunExperiment, AggregateMatchesRecomputationFromTraces) {
  const auto cfg = small_config();
  test_util::TempDir dir("aggregate");
  write_outputs(run_experiment(cfg, 2), dir.path());
  const auto agg = test_util::parse_csv(test_util::read_file(dir.path() / "aggregate.csv"));
  ASSERT_EQ(agg[0], (std::vector<std::string>{"kind", "round", "seeds", "mean_target_rate_bits",
                                              "std_target_rate_bits", "mean_sum_regret_round",
                                              "std_sum_regret_round"}));
  ASSERT_EQ(agg.size(), 1 + cfg.agent_kinds.size() * static_cast<std::size_t>(cfg.J));
  std::map<std::pair<std::string, int>, std::vector<std::string>> by_key;
  for (std::size_t i = 1; i < agg.size(); ++i) by_key[{agg[i][0], std::stoi(agg[i][1])}] = agg[i];

  for (AgentKind kind : cfg.agent_kinds) {
    std::vector<std::vector<std::vector<std::string>>> traces;
    for (auto seed : cfg.seeds) {
      traces.push_back(test_util::parse_csv(
          test_util::read_file(dir.path() / ("trace_" + std::string(to_string(kind)) + "_" + std::to_string(seed) + ".csv"))));
    }
    for (int j = 1; j <= cfg.J; ++j) {
      for (int col : {2, 7}) {
        double total = 0.0;
        for (const auto& tr : traces) total += std::strtod(tr[j][col].c_str(), nullptr);
        const double mean = total / traces.size();
        double sq = 0.0;
        for (const auto& tr : traces) {
          const double d = std::strtod(tr[j][col].c_str(), nullptr) - mean;
          sq += d * d;
        }
        const double sd = std::sqrt(sq / traces.size());
        const auto& row = by_key.at({to_string(kind), j});
        EXPECT_EQ(row[2], "3");
        const int mean_col = col == 2 ? 3 : 5;
        EXPECT_EQ(std::strtod(row[mean_col].c_str(), nullptr), mean) << to_string(kind) << " round " << j;
        EXPECT_EQ(std::strtod(row[mean_col + 1].c_str(), nullptr), sd) << to_string(kind) << " round " << j;
      }
    }
  }
}

TEST(RunExperiment, CodebookLedgerForClusterKinds) {
  auto cfg = small_config();
  cfg.seeds = {4};
  const auto result = run_experiment(cfg);
  const auto& run = result.run(AgentKind::kClusterRKL, 4);
  const auto rows = test_util::parse_csv(codebook_ledger_csv(run, cfg.N, cfg.K));
  ASSERT_EQ(rows.size(), static_cast<std::size_t>(cfg.J) + 1);
  EXPECT_EQ(rows[0][0], "round");
  EXPECT_EQ(rows[1][2], "1");  // first round always ships a codebook
  double retx = 0;
  for (const auto& rec : run.rounds) retx += rec.codebook_retx;
  EXPECT_GE(retx, 1);
}

TEST(EmitPlots, WellFormedSvgAndZeroBandForOneSeed) {
  auto cfg = small_config();
  cfg.seeds = {5};
  cfg.agent_kinds = {AgentKind::kPerfect};
  test_util::TempDir dir("plots");
  const auto files = emit_plots(run_experiment(cfg), dir.path());
  ASSERT_EQ(files.size(), 2u);
  EXPECT_EQ(files[0].filename(), "rate_tiny.svg");
  EXPECT_EQ(files[1].filename(), "regret_tiny.svg");
  for (const auto& f : files) {
    const std::string svg = test_util::read_file(f);
    EXPECT_TRUE(test_util::well_formed_xml(svg)) << f;
    EXPECT_NE(svg.find("<svg"), std::string::npos);
  }
  // One seed: the aggregate std column is identically zero.
  test_util::TempDir out("plots_csv");
  write_outputs(run_experiment(cfg), out.path());
  const auto agg = test_util::parse_csv(test_util::read_file(out.path() / "aggregate.csv"));
  for (std::size_t i = 1; i < agg.size(); ++i) {
    EXPECT_EQ(std::strtod(agg[i][4].c_str(), nullptr), 0.0);
    EXPECT_EQ(std::strtod(agg[i][6].c_str(), nullptr), 0.0);
  }

  ExperimentResult empty;
  empty.config = cfg;
  EXPECT_THROW(emit_plots(empty, dir.path()), DomainError);
}

TEST(FormatDouble, RoundTrips) {
  for (double x : {0.1, 1.0 / 3.0, 527177.62120246934, 1e-300, 0.0}) {
    EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
  }
  EXPECT_EQ(format_double(0.5), "0.5");
}
