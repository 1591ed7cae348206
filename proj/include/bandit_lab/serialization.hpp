#pragma once

// JSON documents for environments, posterior checkpoints, compression results
// and codebooks. Matrices are arrays of rows.

#include <string>

#include "bandit_lab/bandit_env.hpp"
#include "bandit_lab/cluster_coder.hpp"
#include "bandit_lab/rd_compressor.hpp"
#include "bandit_lab/ts_decision_maker.hpp"

namespace bandit_lab {

/// {S, K, G, seed, means, context_dist}
std::string environment_to_json(const EnvironmentSpec& env);
EnvironmentSpec environment_from_json(const std::string& text);

/// {S, K, round, alpha, beta}
std::string posterior_to_json(const PosteriorState& post);
PosteriorState posterior_from_json(const std::string& text);

/// {policy, rate_bits, distortion_nats, multiplier, iterations, converged};
/// an infinite multiplier is written as null.
std::string compression_result_to_json(const CompressionResult& result);

/// {bits, direction, centroids, assignment}
std::string codebook_to_json(const ClusterCodebook& codebook);
/// Distortion fields are left at zero; they depend on the target policy.
ClusterCodebook codebook_from_json(const std::string& text);

}  // namespace bandit_lab
