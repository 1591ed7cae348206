#pragma once

// Replicated experiment runner: config, per-(kind, seed) runs, regret and
// rate traces, CSV/SVG output.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "bandit_lab/bandit_env.hpp"
#include "bandit_lab/channel_protocol.hpp"

namespace bandit_lab {

inline constexpr const char* kSeedOffsetEnvVar = "BANDIT_LAB_SEED_OFFSET";

enum class ClusterBitsMode { kFloorBudget, kCeilTargetRate };

struct ExperimentConfig {
  std::string name = "experiment";
  int S = 1;
  int K = 1;
  int G = 1;
  int N = 1;
  int J = 1;
  RateSchedule rate_schedule = RateSchedule::constant(1.0);
  std::vector<AgentKind> agent_kinds;
  std::vector<std::uint64_t> seeds;
  int mc_samples = kDefaultMcSamples;
  double zeta_nats = kDefaultZetaNats;
  double epsilon_floor = kDefaultEpsilonFloor;
  ClusterBitsMode cluster_bits = ClusterBitsMode::kFloorBudget;

  /// Throws ConfigError naming the offending field.
  void validate() const;
};

/// Parses a JSON config document. Unknown keys are rejected.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
std::string config_to_json(const ExperimentConfig& cfg);

/// Value of BANDIT_LAB_SEED_OFFSET, 0 when unset. Throws ConfigError if malformed.
std::uint64_t seed_offset_from_env();
void apply_seed_offset(ExperimentConfig& cfg, std::uint64_t offset);

/// 2SKN + 4 sqrt((2 + 6 ln T) S K N T).
double system_regret_bound(long long S, long long K, long long N, long long T);

struct RegretTrace {
  std::vector<double> per_virtual_round;
  std::vector<double> cumulative;
  std::vector<double> smoothed;  // trailing mean over `window` entries

  static RegretTrace from_per_round(std::vector<double> regrets, int window);
};

struct RateTrace {
  std::vector<double> per_round_target;
  std::vector<double> per_round_budget;
};

struct SublinearityVerdict {
  bool sublinear = false;
  double q1 = 0.0;  // mean regret over the first quarter
  double q4 = 0.0;  // mean regret over the last quarter
  const char* label() const { return sublinear ? "sublinear-consistent" : "linear-consistent"; }
};

/// Requires at least 4 * agents entries.
SublinearityVerdict sublinearity_verdict(const RegretTrace& trace, int agents);

struct RoundRecord {
  int round = 0;
  double target_rate_bits = 0.0;
  double used_rate_bits = 0.0;
  double budget_bits = 0.0;
  double distortion_nats = 0.0;
  bool codebook_retx = false;
  double codebook_cost_bits = 0.0;
  double sum_regret_round = 0.0;
};

struct RunResult {
  AgentKind kind = AgentKind::kPerfect;
  std::uint64_t seed = 0;
  RegretTrace regret;
  RateTrace rate;
  std::vector<RoundRecord> rounds;
  std::optional<SublinearityVerdict> verdict;  // absent when the trace is shorter than 4N
  double final_cum_regret() const { return regret.cumulative.empty() ? 0.0 : regret.cumulative.back(); }
};

struct ExperimentResult {
  ExperimentConfig config;
  std::vector<RunResult> runs;  // kind-major, then seed, in config order

  const RunResult& run(AgentKind kind, std::uint64_t seed) const;
  std::vector<const RunResult*> runs_of(AgentKind kind) const;
};

/// Environment built from `seed`; contexts and reward noise drawn from a
/// stream shared by every kind with that seed.
RunResult run_single(const ExperimentConfig& cfg, AgentKind kind, std::uint64_t seed);

/// Runs every (kind, seed) pair on `workers` threads. Output does not depend
/// on the worker count.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int workers = 1);

std::string transcript_csv(const RunResult& run);
std::string codebook_ledger_csv(const RunResult& run, int agents, int arms);
std::string summary_csv(const ExperimentResult& result);
/// Per kind and round: mean/std (population) of target rate and round regret across seeds.
std::string aggregate_csv(const ExperimentResult& result);

/// Writes trace_<kind>_<seed>.csv, codebook_<kind>_<seed>.csv (cluster kinds),
/// summary.csv and aggregate.csv. Returns written paths in order.
std::vector<std::filesystem::path> write_outputs(const ExperimentResult& result, const std::filesystem::path& dir);

/// rate_<name>.svg and regret_<name>.svg with mean +- 1 std bands across seeds.
std::vector<std::filesystem::path> emit_plots(const ExperimentResult& result, const std::filesystem::path& dir);

/// Mean and population standard deviation, computed the same way everywhere.
void mean_std(const std::vector<double>& xs, double& mean, double& std_dev);

/// printf("%.17g").
std::string format_double(double x);

}  // namespace bandit_lab
