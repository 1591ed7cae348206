#include "bandit_lab/channel_protocol.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bandit_lab/errors.hpp"

namespace bandit_lab {

const char* to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kPerfect: return "perfect";
    case AgentKind::kCommRKL: return "comm_rkl";
    case AgentKind::kCommFKL: return "comm_fkl";
    case AgentKind::kClusterRKL: return "cluster_rkl";
    case AgentKind::kClusterFKL: return "cluster_fkl";
  }
  return "unknown";
}

const char* display_name(AgentKind kind) {
  switch (kind) {
    case AgentKind::kPerfect: return "Perfect";
    case AgentKind::kCommRKL: return "Comm R-KL";
    case AgentKind::kCommFKL: return "Comm F-KL";
    case AgentKind::kClusterRKL: return "Cluster R-KL";
    case AgentKind::kClusterFKL: return "Cluster F-KL";
  }
  return "unknown";
}

AgentKind agent_kind_from_string(std::string_view name) {
  for (AgentKind k : kAllAgentKinds) {
    if (name == to_string(k) || name == display_name(k)) return k;
  }
  throw ConfigError("unknown agent kind '" + std::string(name) + "'");
}

RateSchedule::RateSchedule(std::vector<RateSegment> segments) : segments_(std::move(segments)) {
  if (segments_.empty()) throw ConfigError("rate schedule needs at least one segment");
  if (segments_.front().start_round != 1) throw ConfigError("rate schedule must start at round 1");
  for (std::size_t i = 0; i < segments_.size(); ++i) {
    if (!(segments_[i].rate_bits >= 0.0)) throw ConfigError("rate schedule entries must be >= 0");
    if (i > 0 && segments_[i].start_round <= segments_[i - 1].start_round) {
      throw ConfigError("rate schedule segments must have increasing start rounds");
    }
  }
}

double RateSchedule::budget_at(int round) const {
  if (segments_.empty()) throw ConfigError("empty rate schedule");
  double rate = segments_.front().rate_bits;
  for (const RateSegment& seg : segments_) {
    if (seg.start_round <= round) rate = seg.rate_bits;
  }
  return rate;
}

namespace {

int cluster_bits_for(double budget_bits) {
  const double floored = std::floor(budget_bits + 1e-9);
  return static_cast<int>(std::clamp(floored, 0.0, static_cast<double>(kMaxCodebookBits)));
}

TransmissionPlan plan_cluster(AgentKind kind, const Policy& pi, const ContextDistribution& ps,
                              double budget_bits, ChannelState& state, const ProtocolOptions& options) {
  const Direction direction = direction_of(kind);
  const int bits = cluster_bits_for(budget_bits);
  TransmissionPlan plan;
  const bool refit = !state.codebook || state.codebook->bits_per_agent != bits ||
                     should_retransmit(state.retransmit, pi, ps, direction);
  if (refit) {
    state.codebook = lloyd_fit(pi, ps, bits, direction, derive_seed(state.codebook_seed, state.codebook_fits++),
                               options.lloyd);
    state.retransmit.last_codebook_policy = pi;
    plan.codebook_retransmitted = true;
    plan.codebook_cost_bits = state.codebook->payload_bits();
  } else {
    // Controller keeps its centroids; the decision-maker re-maps contexts
    // against the current target.
    ClusterCodebook& book = *state.codebook;
    book.assignment = assign_clusters(pi, book.centroids, direction);
    book.avg_distortion_nats = average_distortion(pi, ps, book.centroids, book.assignment, direction);
  }
  plan.codebook = state.codebook;
  plan.sampling_policy = state.codebook->induced_policy();
  plan.used_bits_per_agent = bits;
  plan.distortion_nats = state.codebook->avg_distortion_nats;
  plan.compressed = rate_of(pi, ps) > static_cast<double>(bits);
  return plan;
}

}  // namespace

TransmissionPlan plan_transmission(AgentKind kind, const Policy& pi, const ContextDistribution& ps,
                                   double budget_bits, ChannelState& state, const ProtocolOptions& options) {
  if (!(budget_bits >= 0.0)) throw ConfigError("rate budget must be >= 0");
  if (is_cluster(kind)) return plan_cluster(kind, pi, ps, budget_bits, state, options);

  TransmissionPlan plan;
  const double target_rate = rate_of(pi, ps);
  if (kind == AgentKind::kPerfect || target_rate <= budget_bits) {
    plan.sampling_policy = pi;
    plan.used_bits_per_agent = target_rate;
    return plan;
  }
  Constraint constraint{ConstraintKind::kMaxRateBits, budget_bits, direction_of(kind)};
  CompressionResult result = blahut_arimoto(pi, ps, constraint, options.compression);
  plan.sampling_policy = std::move(result.policy);
  plan.used_bits_per_agent = result.rate_bits;
  plan.distortion_nats = result.distortion_nats;
  plan.compressed = true;
  return plan;
}

Policy exploration_mix(const Policy& q, double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw DomainError("rho must lie in [0, 1]");
  if (rho == 0.0) return q;
  const double uniform = 1.0 / static_cast<double>(q.arms());
  std::vector<double> table = q.table();
  for (double& x : table) x = (1.0 - rho) * x + rho * uniform;
  return Policy(q.contexts(), q.arms(), std::move(table));
}

double rho_schedule(int round) {
  if (round < 1) throw DomainError("round index must be >= 1");
  return std::min(1.0, 1.0 / static_cast<double>(round));
}

double RoundTranscript::sum_regret() const {
  double total = 0.0;
  for (double r : regrets) total += r;
  return total;
}

RoundOutcome run_round(const EnvironmentSpec& env, const PosteriorState& post, AgentKind kind,
                       double budget_bits, const RoundConfig& config, Rng& env_rng, Rng& agent_rng,
                       ChannelState& channel) {
  if (post.contexts() != env.contexts() || post.arms() != env.arms()) {
    throw DimensionError("posterior shape does not match environment");
  }
  if (config.agents < 1) throw ConfigError("need at least one agent");
  const auto n = static_cast<std::size_t>(config.agents);

  RoundTranscript t;
  t.round = post.round() + 1;
  t.kind = kind;
  t.contexts = sample_contexts(env, config.agents, env_rng);
  std::vector<double> reward_noise(n);
  for (double& u : reward_noise) u = uniform01(env_rng);

  t.target_policy = estimate_target_policy(post, config.mc_samples, agent_rng, config.epsilon_floor);
  t.target_rate_bits = rate_of(t.target_policy, env.context_dist());

  if (kind == AgentKind::kPerfect) {
    // An unconstrained link can carry a full arm index per agent.
    budget_bits = std::log2(static_cast<double>(env.arms()));
  } else if (is_cluster(kind) && config.cluster_bits_from_target) {
    budget_bits = std::ceil(t.target_rate_bits - 1e-12);
  }
  t.budget_bits = budget_bits;

  TransmissionPlan plan = plan_transmission(kind, t.target_policy, env.context_dist(), budget_bits, channel,
                                            config.protocol);
  t.used_rate_bits = plan.used_bits_per_agent;
  t.distortion_nats = plan.distortion_nats;
  t.compressed = plan.compressed;
  t.codebook_retransmitted = plan.codebook_retransmitted;
  t.codebook_cost_bits = plan.codebook_cost_bits;
  t.rho = plan.compressed && kind != AgentKind::kPerfect ? rho_schedule(t.round) : 0.0;

  if (is_cluster(kind)) {
    ClusterCodebook mixed = *plan.codebook;
    mixed.centroids = exploration_mix(mixed.centroids, t.rho);
    const EncodedContexts message = encode_contexts(mixed, t.contexts);
    t.arms = decode_and_sample(mixed, message.indices, agent_rng);
    t.sampling_policy = mixed.induced_policy();
  } else {
    t.sampling_policy = exploration_mix(plan.sampling_policy, t.rho);
    t.arms.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      t.arms[i] = static_cast<int>(
          sample_categorical(t.sampling_policy.row(static_cast<std::size_t>(t.contexts[i])), agent_rng));
    }
  }

  t.rewards.resize(n);
  t.regrets.resize(n);
  std::vector<RewardSample> batch(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto s = static_cast<std::size_t>(t.contexts[i]);
    const auto a = static_cast<std::size_t>(t.arms[i]);
    t.rewards[i] = reward_noise[i] < env.mean(s, a) ? 1 : 0;
    t.regrets[i] = env.regret(s, a);
    batch[i] = RewardSample{t.contexts[i], t.arms[i], t.rewards[i]};
  }
  PosteriorState next = update_posteriors(post, batch);
  return RoundOutcome{std::move(t), std::move(next)};
}

}  // namespace bandit_lab
