#pragma once

#include <cstdint>
#include <random>
#include <span>

namespace bandit_lab {

using Rng = std::mt19937_64;

/// splitmix64 finalizer; mixes a base seed with a stream tag so that
/// independent streams can be derived from one experiment seed.
constexpr std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Uniform double in [0, 1).
inline double uniform01(Rng& rng) { return std::generate_canonical<double, 53>(rng); }

/// Index drawn from a probability vector by inversion. The last positive
/// entry absorbs rounding so the result is always in range.
std::size_t sample_categorical(std::span<const double> probs, Rng& rng);

/// Gamma(shape, 1) sampler (Marsaglia-Tsang for shape >= 1, boosted below).
class GammaSampler {
 public:
  explicit GammaSampler(double shape);
  double operator()(Rng& rng) const;
  double shape() const { return shape_; }

 private:
  double shape_;
  double d_;
  double c_;
  bool boost_;
};

/// Beta(alpha, beta). Inversion when either parameter is 1, otherwise the
/// ratio of two gamma draws.
class BetaSampler {
 public:
  BetaSampler(double alpha, double beta);
  double operator()(Rng& rng) const;

 private:
  enum class Form { kGammaRatio, kUniform, kAlphaOne, kBetaOne };
  double alpha_;
  double beta_;
  GammaSampler x_;
  GammaSampler y_;
  Form form_ = Form::kGammaRatio;
};

}  // namespace bandit_lab
