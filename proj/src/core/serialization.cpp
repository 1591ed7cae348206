#include "bandit_lab/serialization.hpp"

#include <cmath>
#include <limits>

#include <json.hpp>

#include "bandit_lab/errors.hpp"

namespace bandit_lab {

using nlohmann::json;

namespace {

json matrix(const std::vector<double>& table, std::size_t rows, std::size_t cols) {
  json out = json::array();
  for (std::size_t r = 0; r < rows; ++r) {
    out.push_back(std::vector<double>(table.begin() + static_cast<long>(r * cols),
                                      table.begin() + static_cast<long>((r + 1) * cols)));
  }
  return out;
}

std::vector<double> flatten(const json& m, std::size_t rows, std::size_t cols, const char* field) {
  if (!m.is_array() || m.size() != rows) {
    throw DimensionError(std::string("'") + field + "' must have " + std::to_string(rows) + " rows");
  }
  std::vector<double> out;
  out.reserve(rows * cols);
  for (const json& row : m) {
    if (!row.is_array() || row.size() != cols) {
      throw DimensionError(std::string("'") + field + "' rows must have " + std::to_string(cols) + " entries");
    }
    for (const json& x : row) out.push_back(x.get<double>());
  }
  return out;
}

json parse_object(const std::string& text, std::initializer_list<const char*> keys) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ConfigError("expected a JSON object");
  for (const char* k : keys) {
    if (!doc.contains(k)) throw ConfigError(std::string("missing key '") + k + "'");
  }
  return doc;
}

template <class F>
auto guarded(F&& f) {
  try {
    return f();
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed document: ") + e.what());
  }
}

}  // namespace

std::string environment_to_json(const EnvironmentSpec& env) {
  json doc;
  doc["S"] = env.contexts();
  doc["K"] = env.arms();
  doc["G"] = env.group_size();
  doc["seed"] = env.seed();
  doc["means"] = matrix(env.means(), env.contexts(), env.arms());
  doc["context_dist"] = std::vector<double>(env.context_dist().probs().begin(), env.context_dist().probs().end());
  return doc.dump();
}

EnvironmentSpec environment_from_json(const std::string& text) {
  const json doc = parse_object(text, {"S", "K", "G", "seed", "means", "context_dist"});
  return guarded([&] {
    const auto s = doc["S"].get<std::size_t>();
    const auto k = doc["K"].get<std::size_t>();
    return EnvironmentSpec(s, k, flatten(doc["means"], s, k, "means"),
                           ContextDistribution(doc["context_dist"].get<std::vector<double>>()), doc["G"].get<int>(),
                           doc["seed"].get<std::uint64_t>());
  });
}

std::string posterior_to_json(const PosteriorState& post) {
  json doc;
  doc["S"] = post.contexts();
  doc["K"] = post.arms();
  doc["round"] = post.round();
  doc["alpha"] = matrix(post.alpha_table(), post.contexts(), post.arms());
  doc["beta"] = matrix(post.beta_table(), post.contexts(), post.arms());
  return doc.dump();
}

PosteriorState posterior_from_json(const std::string& text) {
  const json doc = parse_object(text, {"S", "K", "round", "alpha", "beta"});
  return guarded([&] {
    const auto s = doc["S"].get<std::size_t>();
    const auto k = doc["K"].get<std::size_t>();
    return PosteriorState(s, k, flatten(doc["alpha"], s, k, "alpha"), flatten(doc["beta"], s, k, "beta"),
                          doc["round"].get<int>());
  });
}

std::string compression_result_to_json(const CompressionResult& result) {
  json doc;
  doc["policy"] = matrix(result.policy.table(), result.policy.contexts(), result.policy.arms());
  doc["rate_bits"] = result.rate_bits;
  doc["distortion_nats"] = result.distortion_nats;
  if (std::isfinite(result.multiplier)) {
    doc["multiplier"] = result.multiplier;
  } else {
    doc["multiplier"] = nullptr;
  }
  doc["iterations"] = result.iterations;
  doc["converged"] = result.converged;
  return doc.dump();
}

std::string codebook_to_json(const ClusterCodebook& codebook) {
  json doc;
  doc["bits"] = codebook.bits_per_agent;
  doc["direction"] = to_string(codebook.direction);
  doc["centroids"] = matrix(codebook.centroids.table(), codebook.centroids.contexts(), codebook.centroids.arms());
  doc["assignment"] = codebook.assignment;
  return doc.dump();
}

ClusterCodebook codebook_from_json(const std::string& text) {
  const json doc = parse_object(text, {"bits", "direction", "centroids", "assignment"});
  return guarded([&] {
    ClusterCodebook book;
    book.bits_per_agent = doc["bits"].get<int>();
    if (book.bits_per_agent < 0 || book.bits_per_agent > kMaxCodebookBits) {
      throw DomainError("codebook bits out of range");
    }
    book.direction = direction_from_string(doc["direction"].get<std::string>());
    const std::size_t m = std::size_t{1} << book.bits_per_agent;
    const json& c = doc["centroids"];
    if (!c.is_array() || c.empty() || !c[0].is_array()) throw DimensionError("'centroids' must be a matrix");
    const std::size_t k = c[0].size();
    book.centroids = Policy(m, k, flatten(c, m, k, "centroids"));
    book.assignment = doc["assignment"].get<std::vector<int>>();
    for (int a : book.assignment) {
      if (a < 0 || static_cast<std::size_t>(a) >= m) throw DimensionError("assignment index out of range");
    }
    return book;
  });
}

}  // namespace bandit_lab
