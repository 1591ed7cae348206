#pragma once

// Context-clustering policy coder. Contexts are grouped into M = 2^B clusters
// by Lloyd iterations under a KL cost; each agent's context is sent as a B-bit
// cluster index and the controller samples from the cluster's centroid policy.
//
//   reverse: cost KL(centroid || pi_s), centroid = normalized weighted
//            geometric mean of the member rows (weights P(s) / A(cluster))
//   forward: cost KL(pi_s || centroid), centroid = normalized weighted
//            arithmetic mean of the member rows

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bandit_lab/prob_core.hpp"
#include "bandit_lab/random.hpp"

namespace bandit_lab {

inline constexpr int kMaxCodebookBits = 16;
inline constexpr int kDefaultLloydRestarts = 10;
inline constexpr int kDefaultLloydMaxIter = 100;
inline constexpr double kLloydTolerance = 1e-10;
inline constexpr double kDefaultZetaNats = 0.05;
inline constexpr int kBitsPerProbability = 16;

struct ClusterCodebook {
  Policy centroids;              // M x K
  std::vector<int> assignment;   // context -> cluster
  int bits_per_agent = 0;
  Direction direction = Direction::kReverse;
  double avg_distortion_nats = 0.0;
  std::vector<double> distortion_trace;  // best restart, one entry per assignment step

  std::size_t clusters() const { return centroids.contexts(); }
  /// Cost of shipping the centroid table: M * K * kBitsPerProbability bits.
  double payload_bits() const {
    return static_cast<double>(centroids.contexts() * centroids.arms()) * kBitsPerProbability;
  }
  /// Per-context sampling policy induced by the codebook.
  Policy induced_policy() const;
};

struct RetransmitState {
  std::optional<Policy> last_codebook_policy;  // target policy the codebook was fitted to
  double threshold_nats = kDefaultZetaNats;
};

struct LloydOptions {
  int max_iter = kDefaultLloydMaxIter;
  int restarts = kDefaultLloydRestarts;
  // Use the distinct rows directly when M is at least their number.
  bool exact_shortcut = true;
};

/// Cost of representing target row pi_s by centroid c.
double cluster_cost(std::span<const double> centroid, std::span<const double> target, Direction direction);

std::vector<int> assign_clusters(const Policy& pi, const Policy& centroids, Direction direction);

/// Closed-form centroids for a fixed assignment. Empty clusters are re-seeded
/// with the target row of the worst-represented context.
Policy update_centroids(const Policy& pi, const ContextDistribution& ps, std::span<const int> assignment,
                        std::size_t clusters, Direction direction);

/// sum_s P(s) cost(centroid[assignment[s]], pi_s).
double average_distortion(const Policy& pi, const ContextDistribution& ps, const Policy& centroids,
                          std::span<const int> assignment, Direction direction);

ClusterCodebook lloyd_fit(const Policy& pi, const ContextDistribution& ps, int bits, Direction direction,
                          std::uint64_t seed, const LloydOptions& options = {});

/// True when the expected KL between the last fitted target and pi_new
/// exceeds the threshold. Forward compares KL(pi_new || pi_last), reverse
/// KL(pi_last || pi_new). Always true before the first fit.
bool should_retransmit(const RetransmitState& state, const Policy& pi_new, const ContextDistribution& ps,
                       Direction direction);

struct EncodedContexts {
  std::vector<int> indices;
  int bits_per_agent = 0;
  double payload_bits() const { return static_cast<double>(indices.size()) * bits_per_agent; }
};

EncodedContexts encode_contexts(const ClusterCodebook& codebook, std::span<const int> contexts);
std::vector<int> decode_and_sample(const ClusterCodebook& codebook, std::span<const int> indices, Rng& rng);

}  // namespace bandit_lab
