#include "bandit_lab/cluster_coder.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "bandit_lab/errors.hpp"

namespace bandit_lab {

namespace {

void check_assignment(std::span<const int> assignment, std::size_t contexts, std::size_t clusters) {
  if (assignment.empty()) throw DomainError("empty cluster assignment");
  if (assignment.size() != contexts) throw DimensionError("assignment size does not match context count");
  for (int c : assignment) {
    if (c < 0 || static_cast<std::size_t>(c) >= clusters) {
      throw DimensionError("cluster index " + std::to_string(c) + " out of range");
    }
  }
}

Policy dirichlet_centroids(std::size_t clusters, std::size_t arms, Rng& rng) {
  std::vector<double> table(clusters * arms);
  for (std::size_t c = 0; c < clusters; ++c) {
    double total = 0.0;
    for (std::size_t a = 0; a < arms; ++a) {
      // Exp(1) draws normalized give Dirichlet(1, ..., 1).
      double e = -std::log1p(-uniform01(rng));
      if (!(e > 0.0)) e = std::numeric_limits<double>::min();
      table[c * arms + a] = e;
      total += e;
    }
    for (std::size_t a = 0; a < arms; ++a) table[c * arms + a] /= total;
  }
  return Policy(clusters, arms, std::move(table));
}

// Distinct target rows in first-seen order, compared exactly.
std::vector<std::size_t> distinct_rows(const Policy& pi) {
  std::vector<std::size_t> reps;
  for (std::size_t s = 0; s < pi.contexts(); ++s) {
    const auto r = pi.row(s);
    const bool seen = std::any_of(reps.begin(), reps.end(), [&](std::size_t t) {
      return std::equal(r.begin(), r.end(), pi.row(t).begin());
    });
    if (!seen) reps.push_back(s);
  }
  return reps;
}

struct LloydRun {
  Policy centroids;
  std::vector<int> assignment;
  std::vector<double> trace;
};

// Best single-context move to another non-emptied cluster, centroids refit.
// Returns false when no move lowers the distortion by more than the tolerance.
bool hartigan_move(const Policy& pi, const ContextDistribution& ps, std::size_t clusters, Direction direction,
                   LloydRun& run) {
  std::vector<std::size_t> sizes(clusters, 0);
  for (int c : run.assignment) ++sizes[static_cast<std::size_t>(c)];
  double best = run.trace.back() - kLloydTolerance;
  std::vector<int> best_assignment;
  Policy best_centroids;
  std::vector<int> trial = run.assignment;
  for (std::size_t s = 0; s < pi.contexts(); ++s) {
    const int home = run.assignment[s];
    if (sizes[static_cast<std::size_t>(home)] < 2) continue;
    for (std::size_t c = 0; c < clusters; ++c) {
      if (static_cast<int>(c) == home) continue;
      trial[s] = static_cast<int>(c);
      Policy centroids = update_centroids(pi, ps, trial, clusters, direction);
      const double d = average_distortion(pi, ps, centroids, trial, direction);
      if (d < best) {
        best = d;
        best_assignment = trial;
        best_centroids = std::move(centroids);
      }
    }
    trial[s] = home;
  }
  if (best_assignment.empty()) return false;
  run.assignment = std::move(best_assignment);
  run.centroids = std::move(best_centroids);
  run.trace.push_back(best);
  return true;
}

LloydRun lloyd_once(const Policy& pi, const ContextDistribution& ps, std::size_t clusters,
                    Direction direction, Rng& rng, int max_iter) {
  LloydRun run;
  run.centroids = dirichlet_centroids(clusters, pi.arms(), rng);
  run.assignment = assign_clusters(pi, run.centroids, direction);
  run.trace.push_back(average_distortion(pi, ps, run.centroids, run.assignment, direction));
  int it = 0;
  while (true) {
    for (; it < max_iter; ++it) {
      Policy centroids = update_centroids(pi, ps, run.assignment, clusters, direction);
      std::vector<int> assignment = assign_clusters(pi, centroids, direction);
      const double d = average_distortion(pi, ps, centroids, assignment, direction);
      const double previous = run.trace.back();
      run.centroids = std::move(centroids);
      run.assignment = std::move(assignment);
      run.trace.push_back(d);
      if (previous - d < kLloydTolerance) break;
    }
    if (it >= max_iter || !hartigan_move(pi, ps, clusters, direction, run)) break;
    ++it;
  }
  return run;
}

}  // namespace

Policy ClusterCodebook::induced_policy() const {
  std::vector<double> table;
  table.reserve(assignment.size() * centroids.arms());
  for (int c : assignment) {
    const auto r = centroids.row(static_cast<std::size_t>(c));
    table.insert(table.end(), r.begin(), r.end());
  }
  return Policy(assignment.size(), centroids.arms(), std::move(table));
}

double cluster_cost(std::span<const double> centroid, std::span<const double> target, Direction direction) {
  return direction == Direction::kReverse ? kl_divergence(centroid, target) : kl_divergence(target, centroid);
}

std::vector<int> assign_clusters(const Policy& pi, const Policy& centroids, Direction direction) {
  if (pi.arms() != centroids.arms()) throw DimensionError("centroids and policy have different arm counts");
  std::vector<int> out(pi.contexts());
  for (std::size_t s = 0; s < pi.contexts(); ++s) {
    double best = std::numeric_limits<double>::infinity();
    int best_c = -1;
    for (std::size_t c = 0; c < centroids.contexts(); ++c) {
      double cost;
      try {
        cost = cluster_cost(centroids.row(c), pi.row(s), direction);
      } catch (const DomainError&) {
        continue;  // this centroid cannot represent context s
      }
      if (cost < best) {
        best = cost;
        best_c = static_cast<int>(c);
      }
    }
    if (best_c < 0) {
      throw DomainError("context " + std::to_string(s) + " violates the support of every centroid");
    }
    out[s] = best_c;
  }
  return out;
}

double average_distortion(const Policy& pi, const ContextDistribution& ps, const Policy& centroids,
                          std::span<const int> assignment, Direction direction) {
  check_assignment(assignment, pi.contexts(), centroids.contexts());
  if (ps.size() != pi.contexts()) throw DimensionError("context distribution does not match policy");
  double total = 0.0;
  for (std::size_t s = 0; s < pi.contexts(); ++s) {
    total += ps[s] * cluster_cost(centroids.row(static_cast<std::size_t>(assignment[s])), pi.row(s), direction);
  }
  return total;
}

Policy update_centroids(const Policy& pi, const ContextDistribution& ps, std::span<const int> assignment,
                        std::size_t clusters, Direction direction) {
  if (clusters == 0) throw DomainError("need at least one cluster");
  check_assignment(assignment, pi.contexts(), clusters);
  if (ps.size() != pi.contexts()) throw DimensionError("context distribution does not match policy");
  const std::size_t k = pi.arms();
  std::vector<double> acc(clusters * k, 0.0);
  std::vector<double> mass(clusters, 0.0);
  for (std::size_t s = 0; s < pi.contexts(); ++s) {
    const auto c = static_cast<std::size_t>(assignment[s]);
    mass[c] += ps[s];
    const auto r = pi.row(s);
    for (std::size_t a = 0; a < k; ++a) {
      if (direction == Direction::kForward) {
        acc[c * k + a] += ps[s] * r[a];
      } else {
        if (!(r[a] > 0.0)) {
          throw DomainError("geometric centroid needs strictly positive rows (context " + std::to_string(s) + ")");
        }
        acc[c * k + a] += ps[s] * std::log(r[a]);
      }
    }
  }
  std::vector<double> table(clusters * k);
  std::vector<bool> empty(clusters, false);
  for (std::size_t c = 0; c < clusters; ++c) {
    double* out = table.data() + c * k;
    if (mass[c] <= 0.0) {
      empty[c] = true;
      std::fill(out, out + k, 1.0 / static_cast<double>(k));
      continue;
    }
    double total = 0.0;
    if (direction == Direction::kForward) {
      for (std::size_t a = 0; a < k; ++a) total += out[a] = acc[c * k + a];
    } else {
      double peak = -std::numeric_limits<double>::infinity();
      for (std::size_t a = 0; a < k; ++a) peak = std::max(peak, acc[c * k + a] / mass[c]);
      for (std::size_t a = 0; a < k; ++a) total += out[a] = std::exp(acc[c * k + a] / mass[c] - peak);
    }
    for (std::size_t a = 0; a < k; ++a) out[a] /= total;
  }
  if (std::find(empty.begin(), empty.end(), true) == empty.end()) return Policy(clusters, k, std::move(table));

  // Re-seed each empty cluster with the row of the currently worst-represented
  // context; that context then costs nothing, so the next empty cluster picks another.
  std::vector<double> cost(pi.contexts());
  for (std::size_t s = 0; s < pi.contexts(); ++s) {
    const auto c = static_cast<std::size_t>(assignment[s]);
    cost[s] = ps[s] * cluster_cost(std::span<const double>(table).subspan(c * k, k), pi.row(s), direction);
  }
  for (std::size_t c = 0; c < clusters; ++c) {
    if (!empty[c]) continue;
    const auto worst = static_cast<std::size_t>(std::max_element(cost.begin(), cost.end()) - cost.begin());
    const auto r = pi.row(worst);
    std::copy(r.begin(), r.end(), table.begin() + static_cast<long>(c * k));
    cost[worst] = -1.0;
  }
  return Policy(clusters, k, std::move(table));
}

ClusterCodebook lloyd_fit(const Policy& pi, const ContextDistribution& ps, int bits, Direction direction,
                          std::uint64_t seed, const LloydOptions& options) {
  if (bits < 0 || bits > kMaxCodebookBits) {
    throw DomainError("codebook bits must lie in [0, " + std::to_string(kMaxCodebookBits) + "]");
  }
  if (ps.size() != pi.contexts()) throw DimensionError("context distribution does not match policy");
  if (options.restarts < 1 || options.max_iter < 0) throw DomainError("invalid Lloyd options");
  const std::size_t clusters = std::size_t{1} << bits;

  ClusterCodebook book;
  book.bits_per_agent = bits;
  book.direction = direction;

  const std::vector<std::size_t> reps = distinct_rows(pi);
  if (options.exact_shortcut && clusters >= reps.size()) {
    std::vector<double> table;
    table.reserve(clusters * pi.arms());
    for (std::size_t c = 0; c < clusters; ++c) {
      const auto r = pi.row(reps[c % reps.size()]);
      table.insert(table.end(), r.begin(), r.end());
    }
    book.centroids = Policy(clusters, pi.arms(), std::move(table));
    book.assignment = assign_clusters(pi, book.centroids, direction);
    book.avg_distortion_nats = average_distortion(pi, ps, book.centroids, book.assignment, direction);
    book.distortion_trace = {book.avg_distortion_nats};
    return book;
  }

  bool have = false;
  for (int r = 0; r < options.restarts; ++r) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(r)));
    LloydRun run = lloyd_once(pi, ps, clusters, direction, rng, options.max_iter);
    if (!have || run.trace.back() < book.avg_distortion_nats) {
      have = true;
      book.centroids = std::move(run.centroids);
      book.assignment = std::move(run.assignment);
      book.avg_distortion_nats = run.trace.back();
      book.distortion_trace = std::move(run.trace);
    }
  }
  return book;
}

bool should_retransmit(const RetransmitState& state, const Policy& pi_new, const ContextDistribution& ps,
                       Direction direction) {
  if (!(state.threshold_nats >= 0.0)) throw DomainError("retransmission threshold must be >= 0");
  if (!state.last_codebook_policy) return true;
  const Policy& last = *state.last_codebook_policy;
  if (last.contexts() != pi_new.contexts() || last.arms() != pi_new.arms()) {
    throw DimensionError("retransmission policies have different shapes");
  }
  return expected_conditional_kl(ps, pi_new, last, direction) > state.threshold_nats;
}

EncodedContexts encode_contexts(const ClusterCodebook& codebook, std::span<const int> contexts) {
  EncodedContexts out;
  out.bits_per_agent = codebook.bits_per_agent;
  out.indices.reserve(contexts.size());
  for (int s : contexts) {
    if (s < 0 || static_cast<std::size_t>(s) >= codebook.assignment.size()) {
      throw DimensionError("context " + std::to_string(s) + " out of range");
    }
    out.indices.push_back(codebook.assignment[static_cast<std::size_t>(s)]);
  }
  return out;
}

std::vector<int> decode_and_sample(const ClusterCodebook& codebook, std::span<const int> indices, Rng& rng) {
  std::vector<int> arms;
  arms.reserve(indices.size());
  for (int c : indices) {
    if (c < 0 || static_cast<std::size_t>(c) >= codebook.clusters()) {
      throw DimensionError("cluster index " + std::to_string(c) + " out of range");
    }
    arms.push_back(static_cast<int>(sample_categorical(codebook.centroids.row(static_cast<std::size_t>(c)), rng)));
  }
  return arms;
}

}  // namespace bandit_lab
