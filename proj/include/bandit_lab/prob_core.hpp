#pragma once

// Discrete information-theoretic primitives.
//
// Units: entropies, rates and mutual information are in bits; KL and
// alpha-divergences are in nats. Convert with kLn2 only when reporting.

#include <cstddef>
#include <span>
#include <string_view>
#include <vector>

namespace bandit_lab {

inline constexpr double kLn2 = 0.69314718055994530941723212145818;
inline constexpr double kNormalizationTolerance = 1e-9;
// Probabilities below this are treated as exactly zero for support checks.
inline constexpr double kZeroProbability = 1e-15;

enum class Direction {
  kForward,  // KL(target || approximation)
  kReverse,  // KL(approximation || target)
};

const char* to_string(Direction direction);
Direction direction_from_string(std::string_view name);

/// A probability vector over K outcomes. Validated on construction.
class Distribution {
 public:
  Distribution() = default;
  explicit Distribution(std::vector<double> probs);

  static Distribution uniform(std::size_t k);

  std::size_t size() const { return probs_.size(); }
  double operator[](std::size_t i) const { return probs_[i]; }
  std::span<const double> probs() const { return probs_; }
  operator std::span<const double>() const { return probs_; }

  bool operator==(const Distribution&) const = default;

 private:
  std::vector<double> probs_;
};

/// P_S: a Distribution whose entries are all strictly positive.
class ContextDistribution {
 public:
  ContextDistribution() = default;
  explicit ContextDistribution(std::vector<double> probs);

  static ContextDistribution uniform(std::size_t s);

  std::size_t size() const { return dist_.size(); }
  double operator[](std::size_t i) const { return dist_[i]; }
  std::span<const double> probs() const { return dist_.probs(); }
  const Distribution& distribution() const { return dist_; }

  bool operator==(const ContextDistribution&) const = default;

 private:
  Distribution dist_;
};

/// Row-stochastic S x K table: row s is the arm distribution in context s.
/// Also used for compressed policies and cluster centroid tables.
class Policy {
 public:
  Policy() = default;
  Policy(std::size_t contexts, std::size_t arms, std::vector<double> table);

  static Policy uniform(std::size_t contexts, std::size_t arms);
  static Policy from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t contexts() const { return contexts_; }
  std::size_t arms() const { return arms_; }
  double at(std::size_t s, std::size_t a) const { return table_[s * arms_ + a]; }
  std::span<const double> row(std::size_t s) const {
    return std::span<const double>(table_).subspan(s * arms_, arms_);
  }
  const std::vector<double>& table() const { return table_; }
  std::vector<std::vector<double>> rows() const;

  bool operator==(const Policy&) const = default;

 private:
  std::size_t contexts_ = 0;
  std::size_t arms_ = 0;
  std::vector<double> table_;
};

/// Throws DomainError unless probs is nonnegative and sums to 1 within
/// kNormalizationTolerance.
void validate_distribution(std::span<const double> probs);

/// Rescales a nonnegative vector to sum to one.
std::vector<double> normalized(std::vector<double> weights);

/// Shannon entropy in bits, 0 log 0 := 0.
double entropy(std::span<const double> p);

/// KL(p || q) in nats. DomainError if p is not absolutely continuous w.r.t. q.
double kl_divergence(std::span<const double> p, std::span<const double> q);

/// (1 - sum p^a q^(1-a)) / (a (1 - a)) in nats, alpha in (0, 1).
double alpha_divergence(std::span<const double> p, std::span<const double> q, double alpha);

double total_variation(std::span<const double> p, std::span<const double> q);
double l1_distance(std::span<const double> p, std::span<const double> q);

/// Arm marginal sum_s P_S(s) pol(a|s).
Distribution marginal(const ContextDistribution& ps, const Policy& pol);

/// I(S;A) in bits under P_S(s) pol(a|s).
double mutual_information(const ContextDistribution& ps, const Policy& pol);

/// sum_s P_S(s) KL between rows of p and q, in nats.
/// Forward: KL(p_s || q_s). Reverse: KL(q_s || p_s).
/// Support violations raise DomainError naming the offending context.
double expected_conditional_kl(const ContextDistribution& ps, const Policy& p, const Policy& q,
                               Direction direction);

}  // namespace bandit_lab
