#include "bandit_lab/bandit_env.hpp"

#include <string>

#include "bandit_lab/errors.hpp"

namespace bandit_lab {

namespace {
constexpr std::uint64_t kMeansStream = 0x6d65616e73;  // "means"
}

EnvironmentSpec::EnvironmentSpec(std::size_t contexts, std::size_t arms, std::vector<double> means,
                                 ContextDistribution context_dist, int group_size,
                                 std::uint64_t seed)
    : contexts_(contexts),
      arms_(arms),
      means_(std::move(means)),
      context_dist_(std::move(context_dist)),
      group_size_(group_size),
      seed_(seed) {
  if (contexts_ == 0 || arms_ == 0) throw ConfigError("environment needs S >= 1 and K >= 1");
  if (group_size_ < 1) throw ConfigError("group size G must be >= 1");
  if (means_.size() != contexts_ * arms_) {
    throw DimensionError("means table has " + std::to_string(means_.size()) + " entries, expected " +
                         std::to_string(contexts_ * arms_));
  }
  if (context_dist_.size() != contexts_) {
    throw DimensionError("context distribution size does not match S");
  }
  for (double m : means_) {
    if (!(m >= 0.0 && m <= 1.0)) throw ConfigError("mean reward outside [0, 1]: " + std::to_string(m));
  }
  optimal_arms_.resize(contexts_);
  for (std::size_t s = 0; s < contexts_; ++s) {
    std::size_t best = 0;
    for (std::size_t a = 1; a < arms_; ++a) {
      if (mean(s, a) > mean(s, best)) best = a;
    }
    optimal_arms_[s] = best;
  }
}

std::size_t EnvironmentSpec::optimal_arm(std::size_t s) const { return optimal_arms_.at(s); }

EnvironmentSpec build_environment(int contexts, int arms, int group_size, std::uint64_t seed) {
  if (contexts < 1 || arms < 1) throw ConfigError("S and K must be >= 1");
  if (group_size < 1) throw ConfigError("G must be >= 1");
  if ((contexts - 1) / group_size >= arms) {
    throw ConfigError("optimal arm index (S-1)/G = " + std::to_string((contexts - 1) / group_size) +
                      " is out of range for K = " + std::to_string(arms));
  }
  const auto s_count = static_cast<std::size_t>(contexts);
  const auto k_count = static_cast<std::size_t>(arms);
  Rng rng(derive_seed(seed, kMeansStream));
  std::vector<double> means(s_count * k_count);
  for (double& m : means) m = kSuboptimalMeanCap * uniform01(rng);
  for (std::size_t s = 0; s < s_count; ++s) {
    means[s * k_count + s / static_cast<std::size_t>(group_size)] = kOptimalMean;
  }
  return EnvironmentSpec(s_count, k_count, std::move(means), ContextDistribution::uniform(s_count),
                         group_size, seed);
}

std::vector<int> sample_contexts(const EnvironmentSpec& spec, int n, Rng& rng) {
  if (n < 1) throw ConfigError("number of contexts to sample must be >= 1");
  std::vector<int> out(static_cast<std::size_t>(n));
  for (int& s : out) s = static_cast<int>(sample_categorical(spec.context_dist().probs(), rng));
  return out;
}

int sample_reward(const EnvironmentSpec& spec, int s, int a, Rng& rng) {
  if (s < 0 || static_cast<std::size_t>(s) >= spec.contexts() || a < 0 ||
      static_cast<std::size_t>(a) >= spec.arms()) {
    throw DimensionError("reward index out of range: context " + std::to_string(s) + ", arm " +
                         std::to_string(a));
  }
  return uniform01(rng) < spec.mean(static_cast<std::size_t>(s), static_cast<std::size_t>(a)) ? 1 : 0;
}

Policy optimal_policy(const EnvironmentSpec& spec) {
  std::vector<double> table(spec.contexts() * spec.arms(), 0.0);
  for (std::size_t s = 0; s < spec.contexts(); ++s) table[s * spec.arms() + spec.optimal_arm(s)] = 1.0;
  return Policy(spec.contexts(), spec.arms(), std::move(table));
}

double optimal_rate(const EnvironmentSpec& spec) {
  return entropy(marginal(spec.context_dist(), optimal_policy(spec)));
}

}  // namespace bandit_lab
