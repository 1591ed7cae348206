#include "bandit_lab/rd_compressor.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bandit_lab/errors.hpp"

namespace bandit_lab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Solves e^v + v = t for v = ln W0(e^t). The left side is convex and
// increasing, so Newton converges from any start (monotonically after the
// first step).
double log_lambert_of_exp(double t, double v) {
  for (int i = 0; i < 100; ++i) {
    const double ev = std::exp(v);
    const double step = (ev + v - t) / (ev + 1.0);
    v -= step;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(v))) break;
  }
  return v;
}

double log_lambert_guess(double t) {
  if (t > 1.0) return std::log(t - std::log(t));
  if (t < -2.0) return t - std::exp(t);
  return 0.5 * (t - 1.0);
}

void require_positive_rows(const Policy& pi, const char* what) {
  for (double x : pi.table()) {
    if (!(x > 0.0)) throw DomainError(std::string(what) + " must be strictly positive");
  }
}

void require_positive(const Distribution& d, const char* what) {
  for (double x : d.probs()) {
    if (!(x > 0.0)) throw DomainError(std::string(what) + " must be strictly positive");
  }
}

void require_marginal_shape(const Policy& pi, const Distribution& q_marg) {
  if (q_marg.size() != pi.arms()) throw DimensionError("marginal size does not match arm count");
}

// Solves one forward-family row in place. log_ratio[a] = ln(lambda pi_a / Qm_a).
// Finds u with sum_a lambda pi_a / W(log_ratio[a] + u) = 1 by Newton from the
// left bracket; the sum is convex and decreasing in u.
void solve_forward_row(std::span<const double> row, std::span<const double> q_marg, double lambda,
                       std::span<double> out) {
  const std::size_t k = row.size();
  std::vector<double> log_ratio(k);
  std::vector<double> v(k);  // ln w_a
  double u_low = -kInf;
  double u_high = -kInf;
  for (std::size_t a = 0; a < k; ++a) {
    const double lp = lambda * row[a];
    log_ratio[a] = std::log(lp) - std::log(q_marg[a]);
    u_low = std::max(u_low, std::log(q_marg[a]) + lp);
    u_high = std::max(u_high, lambda + std::log(q_marg[a]) - std::log(row[a]));
  }
  double u = u_low;
  for (std::size_t a = 0; a < k; ++a) {
    v[a] = log_lambert_of_exp(log_ratio[a] + u, log_lambert_guess(log_ratio[a] + u));
  }
  for (int iter = 0; iter < 200; ++iter) {
    double g = -1.0;
    double dg = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      const double w = std::exp(v[a]);
      const double q = lambda * row[a] / w;
      g += q;
      dg -= q / (1.0 + w);
    }
    if (std::abs(g) <= 1e-15 || dg == 0.0) break;
    double step = -g / dg;
    double next = u + step;
    if (!(next <= u_high)) next = 0.5 * (u + u_high);
    if (next < u) next = u;  // convexity keeps iterates on the left; guard rounding
    step = next - u;
    for (std::size_t a = 0; a < k; ++a) {
      const double w = std::exp(v[a]);
      // dv/du = 1 / (1 + w): first-order warm start before polishing.
      v[a] = log_lambert_of_exp(log_ratio[a] + next, v[a] + step / (1.0 + w));
    }
    u = next;
    if (std::abs(step) <= 1e-15 * (1.0 + std::abs(u))) break;
  }
  double total = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    out[a] = lambda * row[a] / std::exp(v[a]);
    total += out[a];
  }
  for (std::size_t a = 0; a < k; ++a) out[a] /= total;
}

}  // namespace

double lambert_w0_of_exp(double t) {
  if (std::isnan(t)) throw DomainError("lambert_w0_of_exp: NaN argument");
  if (t == -kInf) return 0.0;
  if (t == kInf) return kInf;
  return std::exp(log_lambert_of_exp(t, log_lambert_guess(t)));
}

double lambert_w0(double x) {
  if (!(x >= 0.0)) throw DomainError("lambert_w0 requires x >= 0, got " + std::to_string(x));
  if (x == 0.0) return 0.0;
  if (std::isinf(x)) return kInf;
  double w = lambert_w0_of_exp(std::log(x));
  // Polish against w e^w = x directly; the log form loses a few ulps for x near 1.
  if (x < 1e300) {
    for (int i = 0; i < 2; ++i) {
      const double ew = std::exp(w);
      const double f = w * ew - x;
      const double fp = ew * (w + 1.0);
      const double step = f / (fp - (w + 2.0) * f / (2.0 * w + 2.0));
      w -= step;
      if (std::abs(step) <= 1e-17 * (1.0 + w)) break;
    }
  }
  return w;
}

Policy inner_min_reverse(const Policy& pi, const Distribution& q_marg, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0, 1]");
  require_marginal_shape(pi, q_marg);
  require_positive_rows(pi, "target policy");
  require_positive(q_marg, "marginal");
  if (gamma == 0.0) return pi;
  const std::size_t k = pi.arms();
  std::vector<double> table(pi.contexts() * k);
  if (gamma == 1.0) {
    for (std::size_t s = 0; s < pi.contexts(); ++s) {
      std::copy(q_marg.probs().begin(), q_marg.probs().end(), table.begin() + static_cast<long>(s * k));
    }
    return Policy(pi.contexts(), k, std::move(table));
  }
  std::vector<double> log_marg(k);
  for (std::size_t a = 0; a < k; ++a) log_marg[a] = gamma * std::log(q_marg[a]);
  for (std::size_t s = 0; s < pi.contexts(); ++s) {
    const auto row = pi.row(s);
    double* out = table.data() + s * k;
    double peak = -kInf;
    for (std::size_t a = 0; a < k; ++a) {
      out[a] = log_marg[a] + (1.0 - gamma) * std::log(row[a]);
      peak = std::max(peak, out[a]);
    }
    double total = 0.0;
    for (std::size_t a = 0; a < k; ++a) {
      out[a] = std::exp(out[a] - peak);
      total += out[a];
    }
    for (std::size_t a = 0; a < k; ++a) out[a] /= total;
  }
  return Policy(pi.contexts(), k, std::move(table));
}

Policy inner_min_forward(const Policy& pi, const Distribution& q_marg, double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw DomainError("lambda must be positive and finite");
  require_marginal_shape(pi, q_marg);
  require_positive_rows(pi, "target policy");
  require_positive(q_marg, "marginal");
  const std::size_t k = pi.arms();
  std::vector<double> table(pi.contexts() * k);
  for (std::size_t s = 0; s < pi.contexts(); ++s) {
    solve_forward_row(pi.row(s), q_marg.probs(), lambda, std::span<double>(table).subspan(s * k, k));
  }
  return Policy(pi.contexts(), k, std::move(table));
}

double lagrangian_objective(const Policy& pi, const ContextDistribution& ps, const Policy& q,
                            const Distribution& q_marg, Direction direction, double multiplier) {
  double rate_term = 0.0;
  double distortion_term = 0.0;
  for (std::size_t s = 0; s < pi.contexts(); ++s) {
    const auto qr = q.row(s);
    const auto pr = pi.row(s);
    for (std::size_t a = 0; a < pi.arms(); ++a) {
      if (qr[a] > 0.0) rate_term += ps[s] * qr[a] * std::log(qr[a] / q_marg[a]);
    }
    distortion_term += ps[s] * (direction == Direction::kReverse ? kl_divergence(qr, pr)
                                                                 : kl_divergence(pr, qr));
  }
  if (direction == Direction::kReverse) {
    return multiplier * rate_term + (1.0 - multiplier) * distortion_term;
  }
  return rate_term + multiplier * distortion_term;
}

FixedMultiplierRun blahut_arimoto_fixed(const Policy& pi, const ContextDistribution& ps,
                                        Direction direction, double multiplier,
                                        const Distribution& initial_marginal, double tol,
                                        int max_iter) {
  if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
  if (max_iter < 1) throw DomainError("max_iter must be >= 1");
  if (ps.size() != pi.contexts()) throw DimensionError("context distribution does not match policy");
  FixedMultiplierRun run;
  run.marginal = initial_marginal;
  double previous = kInf;
  for (int it = 1; it <= max_iter; ++it) {
    run.policy = direction == Direction::kReverse ? inner_min_reverse(pi, run.marginal, multiplier)
                                                  : inner_min_forward(pi, run.marginal, multiplier);
    run.marginal = marginal(ps, run.policy);
    const double objective =
        lagrangian_objective(pi, ps, run.policy, run.marginal, direction, multiplier);
    run.objective_trace.push_back(objective);
    run.iterations = it;
    if (std::abs(previous - objective) < tol * std::max(1.0, std::abs(objective))) {
      run.converged = true;
      break;
    }
    previous = objective;
  }
  return run;
}

namespace {

class MultiplierSearch {
 public:
  MultiplierSearch(const Policy& pi, const ContextDistribution& ps, Direction direction,
                   const BlahutArimotoOptions& options)
      : pi_(pi), ps_(ps), direction_(direction), options_(options), warm_(marginal(ps, pi)) {}

  CompressionResult evaluate(double multiplier) {
    FixedMultiplierRun run =
        blahut_arimoto_fixed(pi_, ps_, direction_, multiplier, warm_, options_.tol, options_.max_iter);
    warm_ = run.marginal;
    total_iterations_ += run.iterations;
    all_converged_ = all_converged_ && run.converged;
    return finish(std::move(run.policy), multiplier, run.converged);
  }

  CompressionResult finish(Policy q, double multiplier, bool converged) const {
    CompressionResult r;
    r.rate_bits = rate_of(q, ps_);
    r.distortion_nats = expected_conditional_kl(ps_, pi_, q, direction_);
    r.policy = std::move(q);
    r.multiplier = multiplier;
    r.converged = converged;
    return r;
  }

  CompressionResult exact() const {
    return finish(pi_, direction_ == Direction::kReverse ? 0.0 : kInf, true);
  }

  // Best context-independent policy (the zero-rate solution). Forward KL is
  // minimized by the arm marginal of pi, reverse KL by the normalized
  // geometric mean exp(sum_s P(s) ln pi(a|s)).
  CompressionResult context_free() const {
    std::vector<double> row(pi_.arms(), 0.0);
    if (direction_ == Direction::kForward) {
      const Distribution m = marginal(ps_, pi_);
      row.assign(m.probs().begin(), m.probs().end());
    } else {
      for (std::size_t s = 0; s < pi_.contexts(); ++s)
        for (std::size_t a = 0; a < pi_.arms(); ++a) row[a] += ps_[s] * std::log(pi_.at(s, a));
      const double top = *std::max_element(row.begin(), row.end());
      double sum = 0.0;
      for (double& v : row) sum += v = std::exp(v - top);
      for (double& v : row) v /= sum;
    }
    std::vector<double> table;
    table.reserve(pi_.contexts() * pi_.arms());
    for (std::size_t s = 0; s < pi_.contexts(); ++s) table.insert(table.end(), row.begin(), row.end());
    return finish(Policy(pi_.contexts(), pi_.arms(), std::move(table)),
                  direction_ == Direction::kReverse ? 1.0 : 0.0, true);
  }

  CompressionResult stamp(CompressionResult r) const {
    r.iterations = total_iterations_;
    r.converged = r.converged && all_converged_;
    return r;
  }

 private:
  const Policy& pi_;
  const ContextDistribution& ps_;
  Direction direction_;
  BlahutArimotoOptions options_;
  Distribution warm_;
  int total_iterations_ = 0;
  bool all_converged_ = true;
};

// Objective-boundary tolerances for ending the bisection early.
constexpr double kRateSlack = 1e-10;
constexpr double kDistortionSlack = 1e-12;

CompressionResult reverse_max_rate(MultiplierSearch& search, double max_rate, double rate_pi,
                                   int steps) {
  if (rate_pi <= max_rate) return search.exact();
  CompressionResult best = search.context_free();
  if (max_rate <= kRateSlack) return best;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    CompressionResult r = search.evaluate(mid);
    if (r.rate_bits <= max_rate) {
      hi = mid;
      best = std::move(r);
      if (best.rate_bits >= max_rate - kRateSlack) break;
    } else {
      lo = mid;
    }
  }
  return search.stamp(std::move(best));
}

CompressionResult reverse_max_distortion(MultiplierSearch& search, double max_distortion, int steps) {
  CompressionResult best = search.exact();
  if (max_distortion <= 0.0) return best;
  CompressionResult collapsed = search.context_free();
  if (collapsed.distortion_nats <= max_distortion) return collapsed;
  double lo = 0.0;
  double hi = 1.0;
  for (int i = 0; i < steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    CompressionResult r = search.evaluate(mid);
    if (r.distortion_nats <= max_distortion) {
      lo = mid;
      best = std::move(r);
      if (best.distortion_nats >= max_distortion - kDistortionSlack) break;
    } else {
      hi = mid;
    }
  }
  return search.stamp(std::move(best));
}

CompressionResult forward_max_rate(MultiplierSearch& search, double max_rate, double rate_pi,
                                   const BlahutArimotoOptions& options) {
  if (rate_pi <= max_rate) return search.exact();
  CompressionResult low = search.evaluate(options.lambda_min);
  if (low.rate_bits > max_rate) return search.stamp(search.context_free());
  CompressionResult high = search.evaluate(options.lambda_max);
  if (high.rate_bits <= max_rate) return search.stamp(std::move(high));
  double lo = std::log(options.lambda_min);
  double hi = std::log(options.lambda_max);
  CompressionResult best = std::move(low);
  for (int i = 0; i < options.bisection_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    CompressionResult r = search.evaluate(std::exp(mid));
    if (r.rate_bits <= max_rate) {
      lo = mid;
      best = std::move(r);
      if (best.rate_bits >= max_rate - kRateSlack) break;
    } else {
      hi = mid;
    }
  }
  return search.stamp(std::move(best));
}

CompressionResult forward_max_distortion(MultiplierSearch& search, double max_distortion,
                                         const BlahutArimotoOptions& options) {
  if (max_distortion <= 0.0) return search.exact();
  CompressionResult collapsed = search.context_free();
  if (collapsed.distortion_nats <= max_distortion) return collapsed;
  CompressionResult low = search.evaluate(options.lambda_min);
  if (low.distortion_nats <= max_distortion) return search.stamp(std::move(low));
  CompressionResult high = search.evaluate(options.lambda_max);
  if (high.distortion_nats > max_distortion) return search.stamp(search.exact());
  double lo = std::log(options.lambda_min);
  double hi = std::log(options.lambda_max);
  CompressionResult best = std::move(high);
  for (int i = 0; i < options.bisection_steps; ++i) {
    const double mid = 0.5 * (lo + hi);
    CompressionResult r = search.evaluate(std::exp(mid));
    if (r.distortion_nats <= max_distortion) {
      hi = mid;
      best = std::move(r);
      if (best.distortion_nats >= max_distortion - kDistortionSlack) break;
    } else {
      lo = mid;
    }
  }
  return search.stamp(std::move(best));
}

}  // namespace

CompressionResult blahut_arimoto(const Policy& pi, const ContextDistribution& ps,
                                 const Constraint& constraint, const BlahutArimotoOptions& options) {
  if (!(constraint.value >= 0.0)) {
    throw DomainError("infeasible constraint: value must be >= 0, got " + std::to_string(constraint.value));
  }
  if (!(options.tol > 0.0) || options.max_iter < 1) throw DomainError("invalid Blahut-Arimoto options");
  if (!(options.lambda_min > 0.0 && options.lambda_max > options.lambda_min)) {
    throw DomainError("invalid lambda search range");
  }
  if (ps.size() != pi.contexts()) throw DimensionError("context distribution does not match policy");
  require_positive_rows(pi, "target policy");

  MultiplierSearch search(pi, ps, constraint.direction, options);
  const bool rate_cap = constraint.kind == ConstraintKind::kMaxRateBits;
  if (constraint.direction == Direction::kReverse) {
    return rate_cap ? reverse_max_rate(search, constraint.value, rate_of(pi, ps), options.bisection_steps)
                    : reverse_max_distortion(search, constraint.value, options.bisection_steps);
  }
  return rate_cap ? forward_max_rate(search, constraint.value, rate_of(pi, ps), options)
                  : forward_max_distortion(search, constraint.value, options);
}

}  // namespace bandit_lab
