#pragma once

// Beta-Bernoulli Thompson Sampling over a finite context set.

#include <span>
#include <vector>

#include "bandit_lab/bandit_env.hpp"
#include "bandit_lab/prob_core.hpp"
#include "bandit_lab/random.hpp"

namespace bandit_lab {

inline constexpr int kDefaultMcSamples = 4096;
inline constexpr double kDefaultEpsilonFloor = 1e-4;

/// Beta(alpha, beta) per (context, arm). Immutable: updates return a new state.
class PosteriorState {
 public:
  PosteriorState() = default;
  PosteriorState(std::size_t contexts, std::size_t arms, std::vector<double> alpha,
                 std::vector<double> beta, int round);

  /// Beta(1,1) everywhere, round 0.
  static PosteriorState prior(std::size_t contexts, std::size_t arms);

  std::size_t contexts() const { return contexts_; }
  std::size_t arms() const { return arms_; }
  int round() const { return round_; }
  double alpha(std::size_t s, std::size_t a) const { return alpha_[s * arms_ + a]; }
  double beta(std::size_t s, std::size_t a) const { return beta_[s * arms_ + a]; }
  const std::vector<double>& alpha_table() const { return alpha_; }
  const std::vector<double>& beta_table() const { return beta_; }
  double pulls(std::size_t s, std::size_t a) const { return alpha(s, a) + beta(s, a) - 2.0; }

  bool operator==(const PosteriorState&) const = default;

 private:
  std::size_t contexts_ = 0;
  std::size_t arms_ = 0;
  std::vector<double> alpha_;
  std::vector<double> beta_;
  int round_ = 0;
};

inline PosteriorState init_posteriors(std::size_t contexts, std::size_t arms) {
  return PosteriorState::prior(contexts, arms);
}

/// One TS draw in context s: argmax of independent Beta samples, lowest index on ties.
int ts_sample_arm(const PosteriorState& post, int s, Rng& rng);

/// Applies a whole round of rewards at once and advances the round counter.
PosteriorState update_posteriors(const PosteriorState& post, std::span<const RewardSample> batch);

/// Monte Carlo estimate of the policy TS induces: row s holds the fraction of
/// mc_samples joint draws won by each arm. Entries are floored at
/// epsilon_floor and the row renormalized (epsilon_floor = 0 disables this).
Policy estimate_target_policy(const PosteriorState& post, int mc_samples, Rng& rng,
                              double epsilon_floor = kDefaultEpsilonFloor);

/// max(p, eps) then renormalize, rowwise.
Policy apply_epsilon_floor(const Policy& pol, double epsilon_floor);

}  // namespace bandit_lab
