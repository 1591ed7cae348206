#pragma once

// Bernoulli contextual bandit with a grouped optimal-arm layout: in context s
// the best arm is s / G (integer division) with mean 0.8; every other arm has a
// mean drawn uniformly from [0, 0.65).

#include <cstdint>
#include <vector>

#include "bandit_lab/prob_core.hpp"
#include "bandit_lab/random.hpp"

namespace bandit_lab {

inline constexpr double kOptimalMean = 0.8;
inline constexpr double kSuboptimalMeanCap = 0.65;

struct RewardSample {
  int context = 0;
  int arm = 0;
  int reward = 0;
};

class EnvironmentSpec {
 public:
  EnvironmentSpec() = default;
  /// Hand-built environment; means is row-major S x K with entries in [0, 1].
  EnvironmentSpec(std::size_t contexts, std::size_t arms, std::vector<double> means,
                  ContextDistribution context_dist, int group_size = 1, std::uint64_t seed = 0);

  std::size_t contexts() const { return contexts_; }
  std::size_t arms() const { return arms_; }
  int group_size() const { return group_size_; }
  std::uint64_t seed() const { return seed_; }
  const ContextDistribution& context_dist() const { return context_dist_; }
  const std::vector<double>& means() const { return means_; }
  double mean(std::size_t s, std::size_t a) const { return means_[s * arms_ + a]; }

  /// Argmax of row s, lowest index on ties.
  std::size_t optimal_arm(std::size_t s) const;
  /// mu(s, a*) - mu(s, a).
  double regret(std::size_t s, std::size_t a) const { return mean(s, optimal_arm(s)) - mean(s, a); }

  bool operator==(const EnvironmentSpec&) const = default;

 private:
  std::size_t contexts_ = 0;
  std::size_t arms_ = 0;
  std::vector<double> means_;
  ContextDistribution context_dist_;
  int group_size_ = 1;
  std::uint64_t seed_ = 0;
  std::vector<std::size_t> optimal_arms_;
};

/// Deterministic in (S, K, G, seed). Throws ConfigError when (S-1)/G >= K.
EnvironmentSpec build_environment(int contexts, int arms, int group_size, std::uint64_t seed);

std::vector<int> sample_contexts(const EnvironmentSpec& spec, int n, Rng& rng);

/// Bernoulli(mu(s, a)); consumes exactly one uniform from rng.
int sample_reward(const EnvironmentSpec& spec, int s, int a, Rng& rng);

/// Deterministic policy putting all mass on the optimal arm of each context.
Policy optimal_policy(const EnvironmentSpec& spec);

/// H(A*) in bits: entropy of the optimal policy's arm marginal.
double optimal_rate(const EnvironmentSpec& spec);

}  // namespace bandit_lab
