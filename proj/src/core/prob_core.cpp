#include "bandit_lab/prob_core.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "bandit_lab/errors.hpp"

namespace bandit_lab {

namespace {

void require_same_size(std::span<const double> p, std::span<const double> q) {
  if (p.size() != q.size()) {
    throw DimensionError("distribution sizes differ: " + std::to_string(p.size()) + " vs " +
                         std::to_string(q.size()));
  }
}

void require_shape(const ContextDistribution& ps, const Policy& pol) {
  if (ps.size() != pol.contexts()) {
    throw DimensionError("context distribution has " + std::to_string(ps.size()) +
                         " entries but policy has " + std::to_string(pol.contexts()) +
                         " contexts");
  }
}

}  // namespace

const char* to_string(Direction direction) {
  return direction == Direction::kForward ? "forward" : "reverse";
}

Direction direction_from_string(std::string_view name) {
  if (name == "forward") return Direction::kForward;
  if (name == "reverse") return Direction::kReverse;
  throw ConfigError("unknown direction '" + std::string(name) + "'");
}

void validate_distribution(std::span<const double> probs) {
  if (probs.empty()) throw DomainError("empty distribution");
  double sum = 0.0;
  for (double p : probs) {
    if (!(p >= 0.0) || !std::isfinite(p)) {
      throw DomainError("distribution entry is negative or not finite: " + std::to_string(p));
    }
    sum += p;
  }
  if (std::abs(sum - 1.0) > kNormalizationTolerance) {
    throw DomainError("distribution sums to " + std::to_string(sum));
  }
}

std::vector<double> normalized(std::vector<double> weights) {
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  if (!(total > 0.0) || !std::isfinite(total)) {
    throw DomainError("cannot normalize weights with total " + std::to_string(total));
  }
  for (double& w : weights) w /= total;
  return weights;
}

Distribution::Distribution(std::vector<double> probs) : probs_(std::move(probs)) {
  validate_distribution(probs_);
}

Distribution Distribution::uniform(std::size_t k) {
  if (k == 0) throw DomainError("uniform distribution over zero outcomes");
  return Distribution(std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

ContextDistribution::ContextDistribution(std::vector<double> probs) : dist_(std::move(probs)) {
  for (std::size_t s = 0; s < dist_.size(); ++s) {
    if (!(dist_[s] > 0.0)) {
      throw DomainError("context " + std::to_string(s) + " has zero probability");
    }
  }
}

ContextDistribution ContextDistribution::uniform(std::size_t s) {
  ContextDistribution out;
  out.dist_ = Distribution::uniform(s);
  return out;
}

Policy::Policy(std::size_t contexts, std::size_t arms, std::vector<double> table)
    : contexts_(contexts), arms_(arms), table_(std::move(table)) {
  if (contexts_ == 0 || arms_ == 0) throw DimensionError("policy needs at least one context and arm");
  if (table_.size() != contexts_ * arms_) {
    throw DimensionError("policy table has " + std::to_string(table_.size()) + " entries, expected " +
                         std::to_string(contexts_ * arms_));
  }
  for (std::size_t s = 0; s < contexts_; ++s) {
    try {
      validate_distribution(row(s));
    } catch (const DomainError& e) {
      throw DomainError("policy row " + std::to_string(s) + ": " + e.what());
    }
  }
}

Policy Policy::uniform(std::size_t contexts, std::size_t arms) {
  return Policy(contexts, arms,
                std::vector<double>(contexts * arms, 1.0 / static_cast<double>(arms)));
}

Policy Policy::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) throw DimensionError("policy needs at least one row");
  const std::size_t arms = rows.front().size();
  std::vector<double> table;
  table.reserve(rows.size() * arms);
  for (const auto& r : rows) {
    if (r.size() != arms) throw DimensionError("ragged policy rows");
    table.insert(table.end(), r.begin(), r.end());
  }
  return Policy(rows.size(), arms, std::move(table));
}

std::vector<std::vector<double>> Policy::rows() const {
  std::vector<std::vector<double>> out;
  out.reserve(contexts_);
  for (std::size_t s = 0; s < contexts_; ++s) {
    auto r = row(s);
    out.emplace_back(r.begin(), r.end());
  }
  return out;
}

double entropy(std::span<const double> p) {
  double h = 0.0;
  for (double x : p) {
    if (x > 0.0) h -= x * std::log2(x);
  }
  return h;
}

double kl_divergence(std::span<const double> p, std::span<const double> q) {
  require_same_size(p, q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] <= kZeroProbability) continue;
    if (q[i] <= kZeroProbability) {
      throw DomainError("KL support violation at outcome " + std::to_string(i) + ": p=" +
                        std::to_string(p[i]) + " but q=" + std::to_string(q[i]));
    }
    d += p[i] * std::log(p[i] / q[i]);
  }
  // Rounding can leave a tiny negative residue when p == q.
  return d < 0.0 ? 0.0 : d;
}

double alpha_divergence(std::span<const double> p, std::span<const double> q, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw DomainError("alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
  require_same_size(p, q);
  double overlap = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0 && q[i] > 0.0) overlap += std::pow(p[i], alpha) * std::pow(q[i], 1.0 - alpha);
  }
  const double d = (1.0 - overlap) / (alpha * (1.0 - alpha));
  return d < 0.0 ? 0.0 : d;
}

double l1_distance(std::span<const double> p, std::span<const double> q) {
  require_same_size(p, q);
  double d = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) d += std::abs(p[i] - q[i]);
  return d;
}

double total_variation(std::span<const double> p, std::span<const double> q) {
  return 0.5 * l1_distance(p, q);
}

Distribution marginal(const ContextDistribution& ps, const Policy& pol) {
  require_shape(ps, pol);
  std::vector<double> m(pol.arms(), 0.0);
  for (std::size_t s = 0; s < pol.contexts(); ++s) {
    const auto r = pol.row(s);
    for (std::size_t a = 0; a < m.size(); ++a) m[a] += ps[s] * r[a];
  }
  return Distribution(std::move(m));
}

double mutual_information(const ContextDistribution& ps, const Policy& pol) {
  const Distribution m = marginal(ps, pol);
  double mi = 0.0;
  for (std::size_t s = 0; s < pol.contexts(); ++s) {
    const auto r = pol.row(s);
    for (std::size_t a = 0; a < r.size(); ++a) {
      if (r[a] > 0.0) mi += ps[s] * r[a] * std::log2(r[a] / m[a]);
    }
  }
  return mi < 0.0 ? 0.0 : mi;
}

double expected_conditional_kl(const ContextDistribution& ps, const Policy& p, const Policy& q,
                               Direction direction) {
  require_shape(ps, p);
  require_shape(ps, q);
  if (p.arms() != q.arms()) throw DimensionError("policies have different arm counts");
  double total = 0.0;
  for (std::size_t s = 0; s < p.contexts(); ++s) {
    try {
      total += ps[s] * (direction == Direction::kForward ? kl_divergence(p.row(s), q.row(s))
                                                         : kl_divergence(q.row(s), p.row(s)));
    } catch (const DomainError& e) {
      throw DomainError("context " + std::to_string(s) + ": " + e.what());
    }
  }
  return total;
}

}  // namespace bandit_lab
