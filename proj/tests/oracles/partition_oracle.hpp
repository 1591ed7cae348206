#pragma once

// Best two-cluster distortion by enumerating every split of the contexts.
// Centroids are the minimizers of the weighted KL cost: arithmetic mixture
// for KL(pi || c), normalized geometric mean for KL(c || pi).

#include <cmath>
#include <limits>

#include "info_oracle.hpp"

namespace oracle {

inline Row best_centroid(const Row& ps, const Table& pi, const std::vector<int>& members, bool forward) {
  const std::size_t k = pi[0].size();
  Row c(k, 0.0);
  double w = 0.0;
  for (int s : members) w += ps[s];
  if (forward) {
    for (int s : members) {
      for (std::size_t a = 0; a < k; ++a) c[a] += ps[s] / w * pi[s][a];
    }
    return c;
  }
  double z = 0.0;
  for (std::size_t a = 0; a < k; ++a) {
    double lg = 0.0;
    for (int s : members) lg += ps[s] / w * std::log(pi[s][a]);
    c[a] = std::exp(lg);
    z += c[a];
  }
  for (double& x : c) x /= z;
  return c;
}

inline double cluster_cost(const Row& ps, const Table& pi, const std::vector<int>& members, bool forward) {
  if (members.empty()) return 0.0;
  const Row c = best_centroid(ps, pi, members, forward);
  double total = 0.0;
  for (int s : members) total += ps[s] * (forward ? kl_nats(pi[s], c) : kl_nats(c, pi[s]));
  return total;
}

inline double best_two_partition(const Row& ps, const Table& pi, bool forward) {
  const int n = static_cast<int>(pi.size());
  double best = std::numeric_limits<double>::infinity();
  // Context 0 always in the first group; the second group may be empty.
  for (unsigned mask = 0; mask < (1u << (n - 1)); ++mask) {
    std::vector<int> a{0}, b;
    for (int s = 1; s < n; ++s) ((mask >> (s - 1)) & 1u ? b : a).push_back(s);
    best = std::min(best, cluster_cost(ps, pi, a, forward) + cluster_cost(ps, pi, b, forward));
  }
  return best;
}

}  // namespace oracle
