#include "bandit_lab/bandit_lab.h"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <new>
#include <string>
#include <vector>

#include "bandit_lab/bandit_env.hpp"
#include "bandit_lab/cluster_coder.hpp"
#include "bandit_lab/errors.hpp"
#include "bandit_lab/experiment.hpp"
#include "bandit_lab/prob_core.hpp"
#include "bandit_lab/rd_compressor.hpp"
#include "bandit_lab/serialization.hpp"
#include "bandit_lab/ts_decision_maker.hpp"

namespace bl = bandit_lab;

struct bl_rng {
  bl::Rng engine;
};
struct bl_env {
  bl::EnvironmentSpec spec;
};
struct bl_posterior {
  bl::PosteriorState state;
};
struct bl_codebook {
  bl::ClusterCodebook book;
};
struct bl_config {
  bl::ExperimentConfig cfg;
};
struct bl_experiment {
  bl::ExperimentResult result;
};

namespace {

thread_local std::string g_last_error;

bl_status fail(bl_status status, const std::string& message) {
  g_last_error = message;
  return status;
}

template <class F>
bl_status guard(F&& f) noexcept {
  try {
    g_last_error.clear();
    return f();
  } catch (const bl::DimensionError& e) {
    return fail(BL_ERR_DIMENSION, e.what());
  } catch (const bl::ConfigError& e) {
    return fail(BL_ERR_CONFIG, e.what());
  } catch (const bl::DomainError& e) {
    return fail(BL_ERR_DOMAIN, e.what());
  } catch (const bl::IoError& e) {
    return fail(BL_ERR_IO, e.what());
  } catch (const std::filesystem::filesystem_error& e) {
    return fail(BL_ERR_IO, e.what());
  } catch (const std::invalid_argument& e) {
    return fail(BL_ERR_INVALID_ARGUMENT, e.what());
  } catch (const std::bad_alloc&) {
    return fail(BL_ERR_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(BL_ERR_INTERNAL, e.what());
  } catch (...) {
    return fail(BL_ERR_INTERNAL, "unknown error");
  }
}

#define BL_REQUIRE(cond, what) \
  if (!(cond)) return fail(BL_ERR_INVALID_ARGUMENT, what)

bl_status copy_text(const std::string& text, char* buf, size_t cap, size_t* len) {
  BL_REQUIRE(len != nullptr, "len must not be NULL");
  *len = text.size();
  if (buf == nullptr || cap < text.size() + 1) {
    if (buf == nullptr && cap == 0) return BL_OK;
    return fail(BL_ERR_BUFFER_TOO_SMALL, "buffer needs " + std::to_string(text.size() + 1) + " bytes");
  }
  std::memcpy(buf, text.data(), text.size());
  buf[text.size()] = '\0';
  return BL_OK;
}

bl::Direction to_direction(bl_direction d) {
  if (d == BL_DIRECTION_FORWARD) return bl::Direction::kForward;
  if (d == BL_DIRECTION_REVERSE) return bl::Direction::kReverse;
  throw std::invalid_argument("unknown direction");
}

std::span<const double> view(const double* p, size_t n) { return {p, n}; }

bl::Policy policy_from(const double* table, size_t contexts, size_t arms) {
  return bl::Policy(contexts, arms, std::vector<double>(table, table + contexts * arms));
}

bl::ContextDistribution contexts_from(const double* ps, size_t contexts) {
  return bl::ContextDistribution(std::vector<double>(ps, ps + contexts));
}

}  // namespace

extern "C" {

const char* bl_last_error_message(void) { return g_last_error.c_str(); }

const char* bl_status_string(bl_status status) {
  switch (status) {
    case BL_OK: return "ok";
    case BL_ERR_INVALID_ARGUMENT: return "invalid argument";
    case BL_ERR_DOMAIN: return "domain error";
    case BL_ERR_DIMENSION: return "dimension mismatch";
    case BL_ERR_CONFIG: return "configuration error";
    case BL_ERR_IO: return "i/o error";
    case BL_ERR_BUFFER_TOO_SMALL: return "buffer too small";
    case BL_ERR_INTERNAL: return "internal error";
  }
  return "unknown status";
}

const char* bl_version(void) { return "1.0.0"; }

bl_status bl_entropy_bits(const double* p, size_t k, double* out) {
  return guard([&] {
    BL_REQUIRE(p && out, "null pointer");
    *out = bl::entropy(view(p, k));
    return BL_OK;
  });
}

bl_status bl_kl_divergence_nats(const double* p, const double* q, size_t k, double* out) {
  return guard([&] {
    BL_REQUIRE(p && q && out, "null pointer");
    *out = bl::kl_divergence(view(p, k), view(q, k));
    return BL_OK;
  });
}

bl_status bl_mutual_information_bits(const double* ps, size_t contexts, const double* policy, size_t arms,
                                     double* out) {
  return guard([&] {
    BL_REQUIRE(ps && policy && out, "null pointer");
    *out = bl::mutual_information(contexts_from(ps, contexts), policy_from(policy, contexts, arms));
    return BL_OK;
  });
}

bl_status bl_expected_conditional_kl(const double* ps, size_t contexts, const double* p, const double* q,
                                     size_t arms, bl_direction direction, double* out) {
  return guard([&] {
    BL_REQUIRE(ps && p && q && out, "null pointer");
    *out = bl::expected_conditional_kl(contexts_from(ps, contexts), policy_from(p, contexts, arms),
                                       policy_from(q, contexts, arms), to_direction(direction));
    return BL_OK;
  });
}

bl_status bl_lambert_w0(double x, double* out) {
  return guard([&] {
    BL_REQUIRE(out, "null pointer");
    *out = bl::lambert_w0(x);
    return BL_OK;
  });
}

bl_status bl_rng_create(uint64_t seed, bl_rng** out) {
  return guard([&] {
    BL_REQUIRE(out, "null pointer");
    *out = new bl_rng{bl::Rng(seed)};
    return BL_OK;
  });
}

void bl_rng_free(bl_rng* rng) { delete rng; }

bl_status bl_env_build(int contexts, int arms, int group_size, uint64_t seed, bl_env** out) {
  return guard([&] {
    BL_REQUIRE(out, "null pointer");
    *out = new bl_env{bl::build_environment(contexts, arms, group_size, seed)};
    return BL_OK;
  });
}

bl_status bl_env_from_json(const char* json, bl_env** out) {
  return guard([&] {
    BL_REQUIRE(json && out, "null pointer");
    *out = new bl_env{bl::environment_from_json(json)};
    return BL_OK;
  });
}

bl_status bl_env_to_json(const bl_env* env, char* buf, size_t cap, size_t* len) {
  return guard([&] {
    BL_REQUIRE(env, "null handle");
    return copy_text(bl::environment_to_json(env->spec), buf, cap, len);
  });
}

bl_status bl_env_shape(const bl_env* env, size_t* contexts, size_t* arms) {
  return guard([&] {
    BL_REQUIRE(env && contexts && arms, "null pointer");
    *contexts = env->spec.contexts();
    *arms = env->spec.arms();
    return BL_OK;
  });
}

bl_status bl_env_mean(const bl_env* env, int context, int arm, double* out) {
  return guard([&] {
    BL_REQUIRE(env && out, "null pointer");
    if (context < 0 || static_cast<size_t>(context) >= env->spec.contexts() || arm < 0 ||
        static_cast<size_t>(arm) >= env->spec.arms()) {
      return fail(BL_ERR_DIMENSION, "context or arm out of range");
    }
    *out = env->spec.mean(static_cast<size_t>(context), static_cast<size_t>(arm));
    return BL_OK;
  });
}

bl_status bl_env_optimal_arm(const bl_env* env, int context, int* out) {
  return guard([&] {
    BL_REQUIRE(env && out, "null pointer");
    if (context < 0 || static_cast<size_t>(context) >= env->spec.contexts()) {
      return fail(BL_ERR_DIMENSION, "context out of range");
    }
    *out = static_cast<int>(env->spec.optimal_arm(static_cast<size_t>(context)));
    return BL_OK;
  });
}

bl_status bl_env_optimal_rate(const bl_env* env, double* out) {
  return guard([&] {
    BL_REQUIRE(env && out, "null pointer");
    *out = bl::optimal_rate(env->spec);
    return BL_OK;
  });
}

void bl_env_free(bl_env* env) { delete env; }

bl_status bl_posterior_create(size_t contexts, size_t arms, bl_posterior** out) {
  return guard([&] {
    BL_REQUIRE(out, "null pointer");
    *out = new bl_posterior{bl::init_posteriors(contexts, arms)};
    return BL_OK;
  });
}

bl_status bl_posterior_from_json(const char* json, bl_posterior** out) {
  return guard([&] {
    BL_REQUIRE(json && out, "null pointer");
    *out = new bl_posterior{bl::posterior_from_json(json)};
    return BL_OK;
  });
}

bl_status bl_posterior_to_json(const bl_posterior* post, char* buf, size_t cap, size_t* len) {
  return guard([&] {
    BL_REQUIRE(post, "null handle");
    return copy_text(bl::posterior_to_json(post->state), buf, cap, len);
  });
}

bl_status bl_posterior_round(const bl_posterior* post, int* out) {
  return guard([&] {
    BL_REQUIRE(post && out, "null pointer");
    *out = post->state.round();
    return BL_OK;
  });
}

bl_status bl_posterior_update(bl_posterior* post, const int* contexts, const int* arms, const int* rewards,
                              size_t n) {
  return guard([&] {
    BL_REQUIRE(post, "null handle");
    BL_REQUIRE(n == 0 || (contexts && arms && rewards), "null pointer");
    std::vector<bl::RewardSample> batch(n);
    for (size_t i = 0; i < n; ++i) batch[i] = {contexts[i], arms[i], rewards[i]};
    post->state = bl::update_posteriors(post->state, batch);
    return BL_OK;
  });
}

bl_status bl_posterior_target_policy(const bl_posterior* post, int mc_samples, double epsilon_floor, bl_rng* rng,
                                     double* out, size_t out_len) {
  return guard([&] {
    BL_REQUIRE(post && rng && out, "null pointer");
    const size_t need = post->state.contexts() * post->state.arms();
    if (out_len < need) return fail(BL_ERR_BUFFER_TOO_SMALL, "output needs " + std::to_string(need) + " entries");
    const bl::Policy pol = bl::estimate_target_policy(post->state, mc_samples, rng->engine, epsilon_floor);
    std::copy(pol.table().begin(), pol.table().end(), out);
    return BL_OK;
  });
}

void bl_posterior_free(bl_posterior* post) { delete post; }

bl_status bl_compress(const double* pi, size_t contexts, size_t arms, const double* ps, bl_constraint_kind kind,
                      double value, bl_direction direction, double* out_policy, double* out_rate_bits,
                      double* out_distortion_nats, double* out_multiplier) {
  return guard([&] {
    BL_REQUIRE(pi && ps && out_policy, "null pointer");
    BL_REQUIRE(kind == BL_MAX_RATE_BITS || kind == BL_MAX_DISTORTION_NATS, "unknown constraint kind");
    const bl::Constraint constraint{
        kind == BL_MAX_RATE_BITS ? bl::ConstraintKind::kMaxRateBits : bl::ConstraintKind::kMaxDistortionNats, value,
        to_direction(direction)};
    const bl::CompressionResult r =
        bl::blahut_arimoto(policy_from(pi, contexts, arms), contexts_from(ps, contexts), constraint);
    std::copy(r.policy.table().begin(), r.policy.table().end(), out_policy);
    if (out_rate_bits) *out_rate_bits = r.rate_bits;
    if (out_distortion_nats) *out_distortion_nats = r.distortion_nats;
    if (out_multiplier) *out_multiplier = r.multiplier;
    return BL_OK;
  });
}

bl_status bl_codebook_fit(const double* pi, size_t contexts, size_t arms, const double* ps, int bits,
                          bl_direction direction, uint64_t seed, bl_codebook** out) {
  return guard([&] {
    BL_REQUIRE(pi && ps && out, "null pointer");
    *out = new bl_codebook{bl::lloyd_fit(policy_from(pi, contexts, arms), contexts_from(ps, contexts), bits,
                                         to_direction(direction), seed)};
    return BL_OK;
  });
}

bl_status bl_codebook_distortion(const bl_codebook* book, double* out_nats) {
  return guard([&] {
    BL_REQUIRE(book && out_nats, "null pointer");
    *out_nats = book->book.avg_distortion_nats;
    return BL_OK;
  });
}

bl_status bl_codebook_assignment(const bl_codebook* book, int* out, size_t out_len) {
  return guard([&] {
    BL_REQUIRE(book && out, "null pointer");
    const auto& a = book->book.assignment;
    if (out_len < a.size()) return fail(BL_ERR_BUFFER_TOO_SMALL, "output needs " + std::to_string(a.size()) + " entries");
    std::copy(a.begin(), a.end(), out);
    return BL_OK;
  });
}

bl_status bl_codebook_to_json(const bl_codebook* book, char* buf, size_t cap, size_t* len) {
  return guard([&] {
    BL_REQUIRE(book, "null handle");
    return copy_text(bl::codebook_to_json(book->book), buf, cap, len);
  });
}

void bl_codebook_free(bl_codebook* book) { delete book; }

bl_status bl_system_regret_bound(long long S, long long K, long long N, long long T, double* out) {
  return guard([&] {
    BL_REQUIRE(out, "null pointer");
    *out = bl::system_regret_bound(S, K, N, T);
    return BL_OK;
  });
}

bl_status bl_config_load(const char* path, bl_config** out) {
  return guard([&] {
    BL_REQUIRE(path && out, "null pointer");
    *out = new bl_config{bl::load_config(path)};
    return BL_OK;
  });
}

bl_status bl_config_parse(const char* json, bl_config** out) {
  return guard([&] {
    BL_REQUIRE(json && out, "null pointer");
    *out = new bl_config{bl::parse_config(json)};
    return BL_OK;
  });
}

bl_status bl_config_apply_env_seed_offset(bl_config* cfg) {
  return guard([&] {
    BL_REQUIRE(cfg, "null handle");
    bl::apply_seed_offset(cfg->cfg, bl::seed_offset_from_env());
    return BL_OK;
  });
}

bl_status bl_config_to_json(const bl_config* cfg, char* buf, size_t cap, size_t* len) {
  return guard([&] {
    BL_REQUIRE(cfg, "null handle");
    return copy_text(bl::config_to_json(cfg->cfg), buf, cap, len);
  });
}

void bl_config_free(bl_config* cfg) { delete cfg; }

bl_status bl_experiment_run(const bl_config* cfg, int workers, bl_experiment** out) {
  return guard([&] {
    BL_REQUIRE(cfg && out, "null pointer");
    *out = new bl_experiment{bl::run_experiment(cfg->cfg, workers)};
    return BL_OK;
  });
}

bl_status bl_experiment_write_outputs(const bl_experiment* exp, const char* dir) {
  return guard([&] {
    BL_REQUIRE(exp && dir, "null pointer");
    bl::write_outputs(exp->result, dir);
    return BL_OK;
  });
}

bl_status bl_experiment_emit_plots(const bl_experiment* exp, const char* dir) {
  return guard([&] {
    BL_REQUIRE(exp && dir, "null pointer");
    bl::emit_plots(exp->result, dir);
    return BL_OK;
  });
}

bl_status bl_experiment_summary_csv(const bl_experiment* exp, char* buf, size_t cap, size_t* len) {
  return guard([&] {
    BL_REQUIRE(exp, "null handle");
    return copy_text(bl::summary_csv(exp->result), buf, cap, len);
  });
}

void bl_experiment_free(bl_experiment* exp) { delete exp; }

}  // extern "C"
