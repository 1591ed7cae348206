#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "bandit_lab/errors.hpp"
#include "bandit_lab/random.hpp"

using namespace bandit_lab;

TEST(DeriveSeed, DistinctStreamsAndDeterminism) {
  EXPECT_EQ(derive_seed(42, 0), derive_seed(42, 0));
  EXPECT_NE(derive_seed(42, 0), derive_seed(42, 1));
  EXPECT_NE(derive_seed(42, 0), derive_seed(43, 0));
}

TEST(SampleCategorical, FrequenciesMatchProbabilities) {
  Rng rng(1);
  const std::vector<double> p{0.1, 0.0, 0.6, 0.3};
  std::vector<int> counts(4, 0);
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++counts[sample_categorical(p, rng)];
  EXPECT_EQ(counts[1], 0);
  for (std::size_t a = 0; a < p.size(); ++a) {
    const double sigma = std::sqrt(p[a] * (1 - p[a]) / n);
    EXPECT_NEAR(static_cast<double>(counts[a]) / n, p[a], 4 * sigma + 1e-12);
  }
}

TEST(SampleCategorical, RoundingFallsOnLastPositiveEntry) {
  Rng rng(2);
  const std::vector<double> p{0.3, 0.3, 0.3, 0.0};  // sums below 1
  for (int i = 0; i < 10000; ++i) EXPECT_LT(sample_categorical(p, rng), 3u);
}

TEST(GammaSampler, MomentsMatch) {
  for (double shape : {0.3, 1.0, 2.5, 40.0}) {
    GammaSampler g(shape);
    Rng rng(7);
    const int n = 200000;
    double sum = 0.0, sq = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = g(rng);
      ASSERT_GT(x, 0.0);
      sum += x;
      sq += x * x;
    }
    const double mean = sum / n;
    const double var = sq / n - mean * mean;
    EXPECT_NEAR(mean, shape, 5 * std::sqrt(shape / n)) << shape;
    EXPECT_NEAR(var / shape, 1.0, 0.05) << shape;
  }
  EXPECT_THROW(GammaSampler(0.0), DomainError);
  EXPECT_THROW(GammaSampler(-1.0), DomainError);
}

TEST(BetaSampler, MeansMatchForEveryForm) {
  const double cases[][2] = {{1, 1}, {1, 5}, {4, 1}, {2, 3}, {30, 70}};
  for (const auto& c : cases) {
    BetaSampler b(c[0], c[1]);
    Rng rng(9);
    const int n = 200000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
      const double x = b(rng);
      ASSERT_GE(x, 0.0);
      ASSERT_LE(x, 1.0);
      sum += x;
    }
    const double a = c[0], bb = c[1];
    const double mean = a / (a + bb);
    const double sd = std::sqrt(a * bb / ((a + bb) * (a + bb) * (a + bb + 1)));
    EXPECT_NEAR(sum / n, mean, 5 * sd / std::sqrt(n)) << a << "," << bb;
  }
}
