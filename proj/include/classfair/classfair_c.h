/* C interface to the classfair library.
 *
 * All functions return a cf_status; on failure cf_last_error() holds a
 * thread-local message. Objects are opaque handles released with their
 * matching _free function; strings returned through char** out-params are
 * owned by the caller and released with cf_string_free.
 */
#ifndef CLASSFAIR_C_H
#define CLASSFAIR_C_H

#include <stdint.h>

#ifndef CF_API
#if defined(_WIN32)
#define CF_API __declspec(dllexport)
#else
#define CF_API __attribute__((visibility("default")))
#endif
#endif

#ifdef __cplusplus
extern "C" {
#endif

typedef struct cf_instance cf_instance;

typedef enum cf_status {
  CF_OK = 0,
  CF_ERROR_INVALID_ARGUMENT = 1, /* bad parameters, unknown names */
  CF_ERROR_VALIDATION = 2,       /* instance/matching invariant violated */
  CF_ERROR_CAP_EXCEEDED = 3,     /* brute-force oracle size cap */
  CF_ERROR_PARSE = 4,            /* malformed JSON input */
  CF_ERROR_INTERNAL = 5
} cf_status;

CF_API const char* cf_version(void);

/* Message for the most recent failure on this thread ("" if none). */
CF_API const char* cf_last_error(void);

CF_API void cf_string_free(char* s);

/* ---- instances ------------------------------------------------------- */

/* Parses the canonical instance JSON schema. */
CF_API cf_status cf_instance_from_json(const char* json_text, cf_instance** out);

CF_API cf_status cf_instance_to_json(const cf_instance* inst, char** out_json);

/* generator: upper_triangular | cef_impossibility | divisible_hardness |
 * price_of_fairness | cnsw_counterexample | random_bipartite.
 * params_json holds the generator's parameters, e.g. {"n":3} or
 * {"k":2,"agents_per_class":3,"num_items":8,"edge_prob":0.5,"seed":7}. */
CF_API cf_status cf_instance_generate(const char* generator, const char* params_json,
                               cf_instance** out);

CF_API cf_status cf_instance_counts(const cf_instance* inst, int32_t* num_classes,
                             int32_t* num_agents, int32_t* num_items);

CF_API void cf_instance_free(cf_instance* inst);

/* ---- single runs ------------------------------------------------------ */

/* algorithm: random | greedy_lexico | envy_capped (params_json may carry
 * {"alpha":0.5,"cef1":true,"cprop":false}). Returns the full metrics report
 * as JSON. */
CF_API cf_status cf_run(const cf_instance* inst, const char* algorithm, const char* params_json,
                 uint64_t seed, char** out_json);

/* ---- oracles ----------------------------------------------------------- */

/* kind: prop | cmnw | usw_opt. Exact values as JSON; prop includes the
 * divisible-gap flag per class. params_json may override the brute-force
 * size caps: {"prop_max_items":10,"prop_max_classes":4,"cmnw_max_items":8}. */
CF_API cf_status cf_oracle(const cf_instance* inst, const char* kind,
                           const char* params_json, char** out_json);

/* ---- experiments ------------------------------------------------------- */

/* preset: cef_lower | cef_upper | ode_check | cprop | pof | divisible | cnsw.
 * params_json: preset parameters (n, trials, seed, threads, k, p, q, tol,
 * instances - all optional). format: "csv" or "json". config_json is embedded
 * verbatim in the output envelope. all_pass (optional) reports whether every
 * targeted metric met its tolerance. */
CF_API cf_status cf_experiment(const char* preset, const char* params_json,
                        const char* config_json, const char* format, char** out_text,
                        int32_t* all_pass);

/* Monte Carlo harness on a caller-supplied instance. */
CF_API cf_status cf_run_trials(const cf_instance* inst, const char* algorithm,
                        const char* params_json, int32_t trials, uint64_t seed,
                        const char* config_json, const char* format, char** out_text,
                        int32_t* all_pass);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* CLASSFAIR_C_H */
