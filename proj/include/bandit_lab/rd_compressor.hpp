#pragma once

// Rate-distortion compression of a conditional policy pi(a|s) under an
// expected forward or reverse KL distortion, solved by Blahut-Arimoto
// alternation with closed-form inner minimizers and an outer search on the
// Lagrange multiplier.
//
// Reverse family (multiplier gamma in [0, 1]):
//   Q(a|s) ~ Qm(a)^gamma * pi(a|s)^(1-gamma)
// gamma = 0 reproduces pi; gamma = 1 collapses every row onto Qm.
//
// Forward family (multiplier lambda > 0): Q solves, row by row,
//   ln(Q(a|s) / Qm(a)) - lambda * pi(a|s) / Q(a|s) = c_s   for all a,
// i.e. Q(a|s) = lambda pi(a|s) / W0(lambda pi(a|s) e^{-c_s} / Qm(a)), where
// c_s is fixed by normalization. lambda -> infinity recovers pi.

#include <limits>
#include <vector>

#include "bandit_lab/prob_core.hpp"

namespace bandit_lab {

/// Principal branch of the Lambert W function for x >= 0. DomainError on x < 0.
double lambert_w0(double x);

/// W0(exp(t)) for any real t, without forming exp(t).
double lambert_w0_of_exp(double t);

enum class ConstraintKind { kMaxRateBits, kMaxDistortionNats };

struct Constraint {
  ConstraintKind kind = ConstraintKind::kMaxRateBits;
  double value = 0.0;
  Direction direction = Direction::kReverse;
};

struct CompressionResult {
  Policy policy;
  double rate_bits = 0.0;
  double distortion_nats = 0.0;
  // gamma for the reverse family, lambda for the forward family. The forward
  // family reports +infinity when Q = pi exactly.
  double multiplier = 0.0;
  int iterations = 0;
  bool converged = true;
};

struct BlahutArimotoOptions {
  double tol = 1e-10;
  int max_iter = 500;
  int bisection_steps = 60;
  double lambda_min = 1e-6;
  double lambda_max = 1e6;
};

/// Alternating minimization at a fixed multiplier.
struct FixedMultiplierRun {
  Policy policy;
  Distribution marginal;
  std::vector<double> objective_trace;  // Lagrangian after every sweep, nats
  int iterations = 0;
  bool converged = false;
};

Policy inner_min_reverse(const Policy& pi, const Distribution& q_marg, double gamma);
Policy inner_min_forward(const Policy& pi, const Distribution& q_marg, double lambda);

/// Lagrangian minimized by the alternation at a fixed multiplier, in nats.
/// Reverse: gamma * sum P Q ln(Q/Qm) + (1 - gamma) * sum P Q ln(Q/pi).
/// Forward: sum P Q ln(Q/Qm) + lambda * sum P pi ln(pi/Q).
double lagrangian_objective(const Policy& pi, const ContextDistribution& ps, const Policy& q,
                            const Distribution& q_marg, Direction direction, double multiplier);

FixedMultiplierRun blahut_arimoto_fixed(const Policy& pi, const ContextDistribution& ps,
                                        Direction direction, double multiplier,
                                        const Distribution& initial_marginal, double tol,
                                        int max_iter);

/// Minimum-rate policy meeting a distortion cap, or minimum-distortion policy
/// meeting a rate cap. pi must be strictly positive.
CompressionResult blahut_arimoto(const Policy& pi, const ContextDistribution& ps,
                                 const Constraint& constraint,
                                 const BlahutArimotoOptions& options = {});

inline CompressionResult blahut_arimoto(const Policy& pi, const ContextDistribution& ps,
                                        const Constraint& constraint, double tol, int max_iter) {
  BlahutArimotoOptions options;
  options.tol = tol;
  options.max_iter = max_iter;
  return blahut_arimoto(pi, ps, constraint, options);
}

/// Bits per agent needed to convey pol losslessly: I(S;A) under P_S.
inline double rate_of(const Policy& pol, const ContextDistribution& ps) {
  return mutual_information(ps, pol);
}

}  // namespace bandit_lab
