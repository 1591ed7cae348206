#include "bandit_lab/ts_decision_maker.hpp"

#include <algorithm>
#include <string>

#include "bandit_lab/errors.hpp"

namespace bandit_lab {

PosteriorState::PosteriorState(std::size_t contexts, std::size_t arms, std::vector<double> alpha,
                               std::vector<double> beta, int round)
    : contexts_(contexts), arms_(arms), alpha_(std::move(alpha)), beta_(std::move(beta)), round_(round) {
  if (contexts_ == 0 || arms_ == 0) throw DimensionError("posterior needs S >= 1 and K >= 1");
  if (alpha_.size() != contexts_ * arms_ || beta_.size() != contexts_ * arms_) {
    throw DimensionError("posterior tables do not match S x K");
  }
  if (round_ < 0) throw DomainError("posterior round must be >= 0");
  for (std::size_t i = 0; i < alpha_.size(); ++i) {
    if (!(alpha_[i] >= 1.0) || !(beta_[i] >= 1.0)) {
      throw DomainError("posterior parameters must be >= 1 (Beta(1,1) prior plus counts)");
    }
  }
}

PosteriorState PosteriorState::prior(std::size_t contexts, std::size_t arms) {
  return PosteriorState(contexts, arms, std::vector<double>(contexts * arms, 1.0),
                        std::vector<double>(contexts * arms, 1.0), 0);
}

int ts_sample_arm(const PosteriorState& post, int s, Rng& rng) {
  if (s < 0 || static_cast<std::size_t>(s) >= post.contexts()) {
    throw DimensionError("context " + std::to_string(s) + " out of range");
  }
  const auto ctx = static_cast<std::size_t>(s);
  int best = 0;
  double best_value = -1.0;
  for (std::size_t a = 0; a < post.arms(); ++a) {
    const double draw = BetaSampler(post.alpha(ctx, a), post.beta(ctx, a))(rng);
    if (draw > best_value) {
      best_value = draw;
      best = static_cast<int>(a);
    }
  }
  return best;
}

PosteriorState update_posteriors(const PosteriorState& post, std::span<const RewardSample> batch) {
  std::vector<double> alpha = post.alpha_table();
  std::vector<double> beta = post.beta_table();
  for (const RewardSample& r : batch) {
    if (r.context < 0 || static_cast<std::size_t>(r.context) >= post.contexts() || r.arm < 0 ||
        static_cast<std::size_t>(r.arm) >= post.arms()) {
      throw DimensionError("reward record index out of range: context " + std::to_string(r.context) +
                           ", arm " + std::to_string(r.arm));
    }
    if (r.reward != 0 && r.reward != 1) {
      throw DomainError("reward must be 0 or 1, got " + std::to_string(r.reward));
    }
  }
  for (const RewardSample& r : batch) {
    const std::size_t i = static_cast<std::size_t>(r.context) * post.arms() + static_cast<std::size_t>(r.arm);
    (r.reward == 1 ? alpha[i] : beta[i]) += 1.0;
  }
  return PosteriorState(post.contexts(), post.arms(), std::move(alpha), std::move(beta), post.round() + 1);
}

Policy apply_epsilon_floor(const Policy& pol, double epsilon_floor) {
  if (!(epsilon_floor >= 0.0) || epsilon_floor * static_cast<double>(pol.arms()) >= 1.0) {
    throw DomainError("epsilon floor must satisfy 0 <= eps < 1/K");
  }
  if (epsilon_floor == 0.0) return pol;
  std::vector<double> table = pol.table();
  const std::size_t k = pol.arms();
  for (std::size_t s = 0; s < pol.contexts(); ++s) {
    double total = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      double& x = table[s * k + a];
      x = std::max(x, epsilon_floor);
      total += x;
    }
    for (std::size_t a = 0; a < k; ++a) table[s * k + a] /= total;
  }
  return Policy(pol.contexts(), k, std::move(table));
}

Policy estimate_target_policy(const PosteriorState& post, int mc_samples, Rng& rng,
                              double epsilon_floor) {
  if (mc_samples < 1) throw DomainError("mc_samples must be >= 1");
  const std::size_t k = post.arms();
  std::vector<double> table(post.contexts() * k, 0.0);
  std::vector<BetaSampler> samplers;
  samplers.reserve(k);
  for (std::size_t s = 0; s < post.contexts(); ++s) {
    double* row = table.data() + s * k;
    if (k == 1) {
      row[0] = 1.0;
      continue;
    }
    samplers.clear();
    for (std::size_t a = 0; a < k; ++a) samplers.emplace_back(post.alpha(s, a), post.beta(s, a));
    std::vector<int> wins(k, 0);
    for (int m = 0; m < mc_samples; ++m) {
      std::size_t best = 0;
      double best_value = -1.0;
      for (std::size_t a = 0; a < k; ++a) {
        const double draw = samplers[a](rng);
        if (draw > best_value) {
          best_value = draw;
          best = a;
        }
      }
      ++wins[best];
    }
    for (std::size_t a = 0; a < k; ++a) row[a] = static_cast<double>(wins[a]) / mc_samples;
  }
  return apply_epsilon_floor(Policy(post.contexts(), k, std::move(table)), epsilon_floor);
}

}  // namespace bandit_lab
