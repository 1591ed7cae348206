#pragma once

// Decision-maker -> controller round protocol. Each round the decision-maker
// estimates the TS target policy, decides what it can afford to send under
// the per-agent rate budget, and the controller turns the message into arms.

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

#include "bandit_lab/bandit_env.hpp"
#include "bandit_lab/cluster_coder.hpp"
#include "bandit_lab/rd_compressor.hpp"
#include "bandit_lab/ts_decision_maker.hpp"

namespace bandit_lab {

enum class AgentKind { kPerfect, kCommRKL, kCommFKL, kClusterRKL, kClusterFKL };

inline constexpr AgentKind kAllAgentKinds[] = {AgentKind::kPerfect, AgentKind::kCommRKL, AgentKind::kCommFKL,
                                               AgentKind::kClusterRKL, AgentKind::kClusterFKL};

/// Token used in file names and configs: perfect, comm_rkl, comm_fkl, cluster_rkl, cluster_fkl.
const char* to_string(AgentKind kind);
/// Human-readable label: Perfect, Comm R-KL, ...
const char* display_name(AgentKind kind);
/// Accepts either the token or the display label.
AgentKind agent_kind_from_string(std::string_view name);

constexpr bool is_cluster(AgentKind k) { return k == AgentKind::kClusterRKL || k == AgentKind::kClusterFKL; }
constexpr bool is_comm(AgentKind k) { return k == AgentKind::kCommRKL || k == AgentKind::kCommFKL; }
constexpr Direction direction_of(AgentKind k) {
  return (k == AgentKind::kCommFKL || k == AgentKind::kClusterFKL) ? Direction::kForward : Direction::kReverse;
}

struct RateSegment {
  int start_round = 1;
  double rate_bits = 0.0;
  bool operator==(const RateSegment&) const = default;
};

/// Piecewise-constant per-agent budget over system rounds (1-based).
class RateSchedule {
 public:
  RateSchedule() = default;
  explicit RateSchedule(std::vector<RateSegment> segments);
  static RateSchedule constant(double rate_bits) { return RateSchedule({{1, rate_bits}}); }

  double budget_at(int round) const;
  const std::vector<RateSegment>& segments() const { return segments_; }
  bool operator==(const RateSchedule&) const = default;

 private:
  std::vector<RateSegment> segments_;
};

/// What the decision-maker keeps between rounds for one agent kind.
struct ChannelState {
  RetransmitState retransmit;
  std::optional<ClusterCodebook> codebook;
  std::uint64_t codebook_seed = 0;
  int codebook_fits = 0;
};

struct TransmissionPlan {
  Policy sampling_policy;  // Q_j before exploration mixing
  double used_bits_per_agent = 0.0;
  double distortion_nats = 0.0;
  bool compressed = false;  // the target rate exceeded the budget
  std::optional<ClusterCodebook> codebook;
  bool codebook_retransmitted = false;
  double codebook_cost_bits = 0.0;
};

struct ProtocolOptions {
  BlahutArimotoOptions compression;
  LloydOptions lloyd;
};

TransmissionPlan plan_transmission(AgentKind kind, const Policy& pi, const ContextDistribution& ps,
                                   double budget_bits, ChannelState& state, const ProtocolOptions& options = {});

/// (1 - rho) q + rho * uniform, rowwise.
Policy exploration_mix(const Policy& q, double rho);

/// min(1, 1/j): vanishing, with a divergent sum.
double rho_schedule(int round);

struct RoundConfig {
  int agents = 1;
  int mc_samples = kDefaultMcSamples;
  double epsilon_floor = kDefaultEpsilonFloor;
  // Cluster kinds use ceil(target rate) bits instead of floor(budget).
  bool cluster_bits_from_target = false;
  ProtocolOptions protocol;
};

struct RoundTranscript {
  int round = 0;
  AgentKind kind = AgentKind::kPerfect;
  std::vector<int> contexts;
  std::vector<int> arms;
  std::vector<int> rewards;
  std::vector<double> regrets;  // per agent, mu(s, a*) - mu(s, a)
  double target_rate_bits = 0.0;
  double used_rate_bits = 0.0;
  double budget_bits = 0.0;
  double distortion_nats = 0.0;
  double rho = 0.0;
  bool compressed = false;
  bool codebook_retransmitted = false;
  double codebook_cost_bits = 0.0;
  Policy target_policy;
  Policy sampling_policy;  // after exploration mixing

  double sum_regret() const;
};

struct RoundOutcome {
  RoundTranscript transcript;
  PosteriorState posterior;
};

/// One system round. env_rng drives contexts and reward noise only, so every
/// agent kind sharing a seed sees the same context stream and the same
/// per-agent reward uniforms. agent_rng drives TS estimation and arm sampling.
RoundOutcome run_round(const EnvironmentSpec& env, const PosteriorState& post, AgentKind kind,
                       double budget_bits, const RoundConfig& config, Rng& env_rng, Rng& agent_rng,
                       ChannelState& channel);

}  // namespace bandit_lab
