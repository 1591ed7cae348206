#include "bandit_lab/random.hpp"

#include <cmath>
#include <string>

#include <boost/random/normal_distribution.hpp>

#include "bandit_lab/errors.hpp"

namespace bandit_lab {

namespace {

// Ziggurat; holds no cached variate, so samplers stay stateless.
double standard_normal(Rng& rng) {
  boost::random::normal_distribution<double> normal;
  return normal(rng);
}

}  // namespace

std::size_t sample_categorical(std::span<const double> probs, Rng& rng) {
  const double u = uniform01(rng);
  double acc = 0.0;
  std::size_t last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    acc += probs[i];
    last_positive = i;
    if (u < acc) return i;
  }
  return last_positive;
}

GammaSampler::GammaSampler(double shape) : shape_(shape) {
  if (!(shape > 0.0) || !std::isfinite(shape)) {
    throw DomainError("gamma shape must be positive, got " + std::to_string(shape));
  }
  boost_ = shape < 1.0;
  const double a = boost_ ? shape + 1.0 : shape;
  d_ = a - 1.0 / 3.0;
  c_ = 1.0 / std::sqrt(9.0 * d_);
}

double GammaSampler::operator()(Rng& rng) const {
  double value;
  for (;;) {
    double x;
    double v;
    do {
      x = standard_normal(rng);
      v = 1.0 + c_ * x;
    } while (v <= 0.0);
    v = v * v * v;
    const double u = uniform01(rng);
    const double x2 = x * x;
    if (u < 1.0 - 0.0331 * x2 * x2) {
      value = d_ * v;
      break;
    }
    if (std::log(u) < 0.5 * x2 + d_ * (1.0 - v + std::log(v))) {
      value = d_ * v;
      break;
    }
  }
  if (boost_) value *= std::pow(uniform01(rng), 1.0 / shape_);
  return value;
}

}  // namespace bandit_lab

namespace bandit_lab {

BetaSampler::BetaSampler(double alpha, double beta)
    : alpha_(alpha), beta_(beta), x_(alpha), y_(beta) {
  if (alpha == 1.0 && beta == 1.0) {
    form_ = Form::kUniform;
  } else if (alpha == 1.0) {
    form_ = Form::kAlphaOne;
  } else if (beta == 1.0) {
    form_ = Form::kBetaOne;
  }
}

double BetaSampler::operator()(Rng& rng) const {
  switch (form_) {
    case Form::kUniform:
      return uniform01(rng);
    case Form::kAlphaOne:  // CDF 1 - (1 - x)^beta
      return -std::expm1(std::log1p(-uniform01(rng)) / beta_);
    case Form::kBetaOne:  // CDF x^alpha
      return std::exp(std::log1p(-uniform01(rng)) / alpha_);
    case Form::kGammaRatio:
      break;
  }
  const double x = x_(rng);
  const double y = y_(rng);
  return x / (x + y);
}

}  // namespace bandit_lab
