#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "bandit_lab/errors.hpp"
#include "bandit_lab/prob_core.hpp"

using namespace bandit_lab;

namespace {

std::vector<double> random_simplex(std::mt19937_64& rng, std::size_t k, bool strictly_positive = true) {
  std::exponential_distribution<double> ex(1.0);
  std::vector<double> v(k);
  double total = 0.0;
  for (double& x : v) {
    x = ex(rng) + (strictly_positive ? 1e-6 : 0.0);
    total += x;
  }
  for (double& x : v) x /= total;
  return v;
}

Policy random_policy(std::mt19937_64& rng, std::size_t s, std::size_t k) {
  std::vector<std::vector<double>> rows;
  for (std::size_t i = 0; i < s; ++i) rows.push_back(random_simplex(rng, k));
  return Policy::from_rows(rows);
}

}  // namespace

TEST(Distribution, RejectsInvalidVectors) {
  EXPECT_THROW(Distribution({0.5, 0.6}), DomainError);
  EXPECT_THROW(Distribution({-0.1, 1.1}), DomainError);
  EXPECT_THROW(Distribution(std::vector<double>{}), DomainError);
  EXPECT_NO_THROW(Distribution({0.5, 0.5 + 5e-10}));
}

TEST(ContextDistribution, RequiresStrictlyPositiveEntries) {
  EXPECT_THROW(ContextDistribution({1.0, 0.0}), DomainError);
  EXPECT_NO_THROW(ContextDistribution({0.25, 0.75}));
}

TEST(Policy, ValidatesRowsAndShape) {
  EXPECT_THROW(Policy(2, 2, {0.5, 0.5, 0.9, 0.2}), DomainError);
  EXPECT_THROW(Policy(2, 2, {0.5, 0.5}), DimensionError);
  const Policy p = Policy::uniform(3, 4);
  EXPECT_DOUBLE_EQ(p.at(2, 3), 0.25);
}

TEST(Entropy, KnownValues) {
  EXPECT_DOUBLE_EQ(entropy(std::vector<double>{0.5, 0.5}), 1.0);
  EXPECT_DOUBLE_EQ(entropy(std::vector<double>{1.0, 0.0}), 0.0);
  // mpmath, 30 digits
  EXPECT_NEAR(entropy(std::vector<double>{0.25, 0.75}), 0.811278124459132863909695792039, 1e-15);
}

TEST(Entropy, BoundedByLogK) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    const auto p = random_simplex(rng, 7);
    const double h = entropy(p);
    EXPECT_GE(h, 0.0);
    EXPECT_LE(h, std::log2(7.0) + 1e-12);
  }
}

TEST(KlDivergence, KnownValuesAndSupport) {
  EXPECT_DOUBLE_EQ(kl_divergence(std::vector<double>{0.3, 0.7}, std::vector<double>{0.3, 0.7}), 0.0);
  EXPECT_NEAR(kl_divergence(std::vector<double>{1.0, 0.0}, std::vector<double>{0.5, 0.5}),
              0.693147180559945309417232121458, 1e-15);
  EXPECT_THROW(kl_divergence(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 0.0}), DomainError);
  // below the zero threshold counts as zero mass
  EXPECT_THROW(kl_divergence(std::vector<double>{0.5, 0.5}, std::vector<double>{1.0, 1e-16}), DomainError);
}

TEST(KlDivergence, GibbsInequalityOnRandomPairs) {
  std::mt19937_64 rng(11);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_simplex(rng, 5);
    const auto q = random_simplex(rng, 5);
    EXPECT_GE(kl_divergence(p, q), 0.0);
    EXPECT_EQ(kl_divergence(p, p), 0.0);
  }
}

TEST(AlphaDivergence, KnownValues) {
  const std::vector<double> p{0.9, 0.1}, q{0.5, 0.5};
  EXPECT_NEAR(alpha_divergence(p, p, 0.5), 0.0, 1e-15);
  // 4 (1 - (sqrt 0.45 + sqrt 0.05)), mpmath
  EXPECT_NEAR(alpha_divergence(p, q, 0.5), 0.42229123600033648574532213003, 1e-14);
  EXPECT_THROW(alpha_divergence(p, q, 0.0), DomainError);
  EXPECT_THROW(alpha_divergence(p, q, 1.0), DomainError);
  EXPECT_THROW(alpha_divergence(p, q, -0.5), DomainError);
}

TEST(AlphaDivergence, LimitsApproachBothKlDirections) {
  // The gap to the KL limit is about alpha/2 * E[(ln p/q)^2], so pairs are
  // kept away from the simplex boundary by mixing in 20% uniform mass.
  auto interior = [](std::vector<double> v) {
    for (double& x : v) x = 0.8 * x + 0.2 / static_cast<double>(v.size());
    return v;
  };
  std::mt19937_64 rng(5);
  for (int i = 0; i < 200; ++i) {
    const auto p = interior(random_simplex(rng, 4));
    const auto q = interior(random_simplex(rng, 4));
    EXPECT_NEAR(alpha_divergence(p, q, 1e-4), kl_divergence(q, p), 1e-3);
    EXPECT_NEAR(alpha_divergence(p, q, 1.0 - 1e-4), kl_divergence(p, q), 1e-3);
  }
}

TEST(Marginal, KnownValues) {
  const auto ps = ContextDistribution::uniform(2);
  const Distribution m = marginal(ps, Policy::from_rows({{1, 0}, {0, 1}}));
  EXPECT_DOUBLE_EQ(m[0], 0.5);
  EXPECT_DOUBLE_EQ(m[1], 0.5);

  const Distribution single = marginal(ContextDistribution::uniform(1), Policy::from_rows({{0.3, 0.7}}));
  EXPECT_DOUBLE_EQ(single[0], 0.3);
  EXPECT_DOUBLE_EQ(single[1], 0.7);

  const Distribution mix =
      marginal(ContextDistribution({0.25, 0.75}), Policy::from_rows({{0.8, 0.2}, {0.4, 0.6}}));
  EXPECT_NEAR(mix[0], 0.5, 1e-15);
  EXPECT_NEAR(mix[1], 0.5, 1e-15);

  EXPECT_THROW(marginal(ContextDistribution::uniform(3), Policy::uniform(2, 2)), DimensionError);
}

TEST(MutualInformation, KnownValues) {
  const auto ps2 = ContextDistribution::uniform(2);
  EXPECT_DOUBLE_EQ(mutual_information(ps2, Policy::from_rows({{0.3, 0.7}, {0.3, 0.7}})), 0.0);
  EXPECT_NEAR(mutual_information(ps2, Policy::from_rows({{1, 0}, {0, 1}})), 1.0, 1e-15);

  // optimal layout for 16 contexts in groups of 8: arm floor(s / 8)
  std::vector<std::vector<double>> rows(16, std::vector<double>(16, 0.0));
  for (int s = 0; s < 16; ++s) rows[s][s / 8] = 1.0;
  EXPECT_NEAR(mutual_information(ContextDistribution::uniform(16), Policy::from_rows(rows)), 1.0, 1e-12);
  EXPECT_THROW(mutual_information(ps2, Policy::uniform(3, 2)), DimensionError);
}

TEST(MutualInformation, EqualsEntropyDecomposition) {
  std::mt19937_64 rng(17);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t s = 2 + i % 5, k = 2 + i % 4;
    const Policy pol = random_policy(rng, s, k);
    const ContextDistribution ps(random_simplex(rng, s));
    double cond = 0.0;
    for (std::size_t c = 0; c < s; ++c) cond += ps[c] * entropy(pol.row(c));
    const double mi = mutual_information(ps, pol);
    EXPECT_NEAR(mi, entropy(marginal(ps, pol).probs()) - cond, 1e-9);
    EXPECT_GE(mi, 0.0);
    EXPECT_LE(mi, std::log2(static_cast<double>(std::min(s, k))) + 1e-9);
  }
}

TEST(ExpectedConditionalKl, DirectionsAndReductions) {
  const Policy p = Policy::from_rows({{0.9, 0.1}, {0.2, 0.8}});
  const Policy q = Policy::from_rows({{0.6, 0.4}, {0.5, 0.5}});
  const auto ps = ContextDistribution::uniform(2);
  EXPECT_EQ(expected_conditional_kl(ps, p, p, Direction::kForward), 0.0);
  const double fwd = 0.5 * kl_divergence(p.row(0), q.row(0)) + 0.5 * kl_divergence(p.row(1), q.row(1));
  const double rev = 0.5 * kl_divergence(q.row(0), p.row(0)) + 0.5 * kl_divergence(q.row(1), p.row(1));
  EXPECT_DOUBLE_EQ(expected_conditional_kl(ps, p, q, Direction::kForward), fwd);
  EXPECT_DOUBLE_EQ(expected_conditional_kl(ps, p, q, Direction::kReverse), rev);

  const Policy one = Policy::from_rows({{0.7, 0.3}});
  const Policy two = Policy::from_rows({{0.4, 0.6}});
  EXPECT_DOUBLE_EQ(expected_conditional_kl(ContextDistribution::uniform(1), one, two, Direction::kForward),
                   kl_divergence(one.row(0), two.row(0)));
}

TEST(ExpectedConditionalKl, SupportErrorNamesContext) {
  const Policy p = Policy::from_rows({{0.5, 0.5}, {0.5, 0.5}});
  const Policy q = Policy::from_rows({{0.5, 0.5}, {1.0, 0.0}});
  try {
    expected_conditional_kl(ContextDistribution::uniform(2), p, q, Direction::kForward);
    FAIL() << "expected a support violation";
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("context 1"), std::string::npos) << e.what();
  }
}

TEST(PinskerChain, HoldsOnRandomInstances) {
  std::mt19937_64 rng(23);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (int i = 0; i < 1000; ++i) {
    const std::size_t s = 1 + i % 4, k = 2 + i % 5;
    const Policy pi = random_policy(rng, s, k);
    const Policy q = random_policy(rng, s, k);
    const ContextDistribution ps(random_simplex(rng, s));
    double reward_gap = 0.0, l1 = 0.0, pinsker = 0.0;
    for (std::size_t c = 0; c < s; ++c) {
      double gap = 0.0;
      for (std::size_t a = 0; a < k; ++a) gap += unit(rng) * (pi.at(c, a) - q.at(c, a));
      reward_gap += ps[c] * std::abs(gap);
      l1 += ps[c] * l1_distance(pi.row(c), q.row(c));
      pinsker += ps[c] * std::sqrt(2.0 * kl_divergence(pi.row(c), q.row(c)));
    }
    EXPECT_LE(reward_gap, l1 + 1e-12);
    EXPECT_LE(l1, pinsker + 1e-12);
  }
}

TEST(InversePinsker, HoldsOnRandomInstances) {
  std::mt19937_64 rng(29);
  for (int i = 0; i < 1000; ++i) {
    const auto p = random_simplex(rng, 2 + i % 6);
    const auto q = random_simplex(rng, p.size());
    const double sigma = *std::min_element(q.begin(), q.end());
    const double tv = total_variation(p, q);
    EXPECT_LE(kl_divergence(p, q), 2.0 * tv * tv / sigma + 1e-12);
  }
}

TEST(Direction, StringRoundTrip) {
  EXPECT_EQ(direction_from_string("forward"), Direction::kForward);
  EXPECT_EQ(direction_from_string(to_string(Direction::kReverse)), Direction::kReverse);
  EXPECT_THROW(direction_from_string("sideways"), std::invalid_argument);
}
