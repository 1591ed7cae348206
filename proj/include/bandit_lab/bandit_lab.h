#ifndef BANDIT_LAB_H
#define BANDIT_LAB_H

/* C interface to the bandit_lab shared library.
 *
 * Every function returns a bl_status. On failure the thread-local message
 * from bl_last_error_message() describes the cause. Objects are opaque
 * handles released with the matching *_free function (NULL is accepted).
 *
 * Policies and matrices are row-major double arrays, contexts x arms.
 * Functions that produce text take (buf, cap, len): *len receives the text
 * length without the terminator; BL_ERR_BUFFER_TOO_SMALL is returned when
 * cap < *len + 1. Passing buf = NULL, cap = 0 queries the length. */

#include <stddef.h>
#include <stdint.h>

#if defined(_WIN32)
#define BL_API __declspec(dllexport)
#else
#define BL_API __attribute__((visibility("default")))
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef enum bl_status {
  BL_OK = 0,
  BL_ERR_INVALID_ARGUMENT = 1,
  BL_ERR_DOMAIN = 2,
  BL_ERR_DIMENSION = 3,
  BL_ERR_CONFIG = 4,
  BL_ERR_IO = 5,
  BL_ERR_BUFFER_TOO_SMALL = 6,
  BL_ERR_INTERNAL = 7
} bl_status;

typedef enum bl_direction { BL_DIRECTION_FORWARD = 0, BL_DIRECTION_REVERSE = 1 } bl_direction;

typedef enum bl_constraint_kind { BL_MAX_RATE_BITS = 0, BL_MAX_DISTORTION_NATS = 1 } bl_constraint_kind;

typedef enum bl_agent_kind {
  BL_AGENT_PERFECT = 0,
  BL_AGENT_COMM_RKL = 1,
  BL_AGENT_COMM_FKL = 2,
  BL_AGENT_CLUSTER_RKL = 3,
  BL_AGENT_CLUSTER_FKL = 4
} bl_agent_kind;

typedef struct bl_rng bl_rng;
typedef struct bl_env bl_env;
typedef struct bl_posterior bl_posterior;
typedef struct bl_codebook bl_codebook;
typedef struct bl_config bl_config;
typedef struct bl_experiment bl_experiment;

BL_API const char* bl_last_error_message(void);
BL_API const char* bl_status_string(bl_status status);
BL_API const char* bl_version(void);

/* Information measures. Entropy and mutual information in bits, KL in nats. */
BL_API bl_status bl_entropy_bits(const double* p, size_t k, double* out);
BL_API bl_status bl_kl_divergence_nats(const double* p, const double* q, size_t k, double* out);
BL_API bl_status bl_mutual_information_bits(const double* ps, size_t contexts, const double* policy, size_t arms,
                                            double* out);
/* Forward: sum_s P(s) KL(p_s || q_s). Reverse: sum_s P(s) KL(q_s || p_s). */
BL_API bl_status bl_expected_conditional_kl(const double* ps, size_t contexts, const double* p, const double* q,
                                            size_t arms, bl_direction direction, double* out);
BL_API bl_status bl_lambert_w0(double x, double* out);

BL_API bl_status bl_rng_create(uint64_t seed, bl_rng** out);
BL_API void bl_rng_free(bl_rng* rng);

/* Environment with optimal mean 0.8 at arm floor(s / G). */
BL_API bl_status bl_env_build(int contexts, int arms, int group_size, uint64_t seed, bl_env** out);
BL_API bl_status bl_env_from_json(const char* json, bl_env** out);
BL_API bl_status bl_env_to_json(const bl_env* env, char* buf, size_t cap, size_t* len);
BL_API bl_status bl_env_shape(const bl_env* env, size_t* contexts, size_t* arms);
BL_API bl_status bl_env_mean(const bl_env* env, int context, int arm, double* out);
BL_API bl_status bl_env_optimal_arm(const bl_env* env, int context, int* out);
/* Entropy of the optimal-arm marginal, in bits. */
BL_API bl_status bl_env_optimal_rate(const bl_env* env, double* out);
BL_API void bl_env_free(bl_env* env);

/* Beta(1,1) posteriors per (context, arm). */
BL_API bl_status bl_posterior_create(size_t contexts, size_t arms, bl_posterior** out);
BL_API bl_status bl_posterior_from_json(const char* json, bl_posterior** out);
BL_API bl_status bl_posterior_to_json(const bl_posterior* post, char* buf, size_t cap, size_t* len);
BL_API bl_status bl_posterior_round(const bl_posterior* post, int* out);
/* One batch of n (context, arm, reward) samples, applied atomically. */
BL_API bl_status bl_posterior_update(bl_posterior* post, const int* contexts, const int* arms, const int* rewards,
                                     size_t n);
/* Monte Carlo estimate of the Thompson sampling policy; out holds contexts*arms. */
BL_API bl_status bl_posterior_target_policy(const bl_posterior* post, int mc_samples, double epsilon_floor,
                                            bl_rng* rng, double* out, size_t out_len);
BL_API void bl_posterior_free(bl_posterior* post);

/* Rate-distortion compression of policy pi under one constraint. out_policy
 * holds contexts*arms entries. Any of the scalar outputs may be NULL. */
BL_API bl_status bl_compress(const double* pi, size_t contexts, size_t arms, const double* ps,
                             bl_constraint_kind kind, double value, bl_direction direction, double* out_policy,
                             double* out_rate_bits, double* out_distortion_nats, double* out_multiplier);

BL_API bl_status bl_codebook_fit(const double* pi, size_t contexts, size_t arms, const double* ps, int bits,
                                 bl_direction direction, uint64_t seed, bl_codebook** out);
BL_API bl_status bl_codebook_distortion(const bl_codebook* book, double* out_nats);
BL_API bl_status bl_codebook_assignment(const bl_codebook* book, int* out, size_t out_len);
BL_API bl_status bl_codebook_to_json(const bl_codebook* book, char* buf, size_t cap, size_t* len);
BL_API void bl_codebook_free(bl_codebook* book);

/* 2SKN + 4 sqrt((2 + 6 ln T) SKNT). */
BL_API bl_status bl_system_regret_bound(long long S, long long K, long long N, long long T, double* out);

BL_API bl_status bl_config_load(const char* path, bl_config** out);
BL_API bl_status bl_config_parse(const char* json, bl_config** out);
/* Adds BANDIT_LAB_SEED_OFFSET (if set) to every seed. */
BL_API bl_status bl_config_apply_env_seed_offset(bl_config* cfg);
BL_API bl_status bl_config_to_json(const bl_config* cfg, char* buf, size_t cap, size_t* len);
BL_API void bl_config_free(bl_config* cfg);

BL_API bl_status bl_experiment_run(const bl_config* cfg, int workers, bl_experiment** out);
/* trace_<kind>_<seed>.csv, codebook_<kind>_<seed>.csv, summary.csv, aggregate.csv */
BL_API bl_status bl_experiment_write_outputs(const bl_experiment* exp, const char* dir);
/* rate_<name>.svg and regret_<name>.svg */
BL_API bl_status bl_experiment_emit_plots(const bl_experiment* exp, const char* dir);
BL_API bl_status bl_experiment_summary_csv(const bl_experiment* exp, char* buf, size_t cap, size_t* len);
BL_API void bl_experiment_free(bl_experiment* exp);

#ifdef __cplusplus
}
#endif

#endif /* BANDIT_LAB_H */
