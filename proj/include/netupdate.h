/* Copyright 2026 The netupdate authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

/* C interface to the netupdate core. Handles are opaque; every function
 * returns a status code and reports details through out-parameters. Strings
 * returned through `char**` out-parameters are heap-allocated and must be
 * released with nu_string_free; handles must be released with their matching
 * *_free function. Handles are immutable after creation and may be shared
 * across threads for concurrent reads.
 */

#ifndef NETUPDATE_H_
#define NETUPDATE_H_

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct nu_network nu_network;  /* topology + packet space + named policies */
typedef struct nu_formula nu_formula;  /* parsed LTL specification */
typedef struct nu_plan nu_plan;        /* synthesized or loaded command sequence */

typedef enum nu_status {
  NU_OK = 0,
  NU_ERR_IO = 1,            /* file missing or unreadable */
  NU_ERR_PARSE = 2,         /* malformed JSON, LTL, or plan */
  NU_ERR_VALIDATION = 3,    /* model violates an invariant, or a plan check failed */
  NU_ERR_INFEASIBLE = 4,    /* no simple and careful update sequence exists */
  NU_ERR_PRECONDITION = 5,  /* loopy endpoint configurations or budget exhausted */
  NU_ERR_UNAVAILABLE = 6,   /* optional external oracle not present */
  NU_ERR_INTERNAL = 7
} nu_status;

typedef enum nu_algorithm {
  NU_ALGO_ORDER = 0,
  NU_ALGO_CONFIG_PAIRS = 1,
  NU_ALGO_REFINE = 2
} nu_algorithm;

typedef struct nu_synth_options {
  nu_algorithm algorithm;
  int cex_learning;      /* nonzero enables counterexample cubes (default on) */
  uint64_t max_visited;  /* 0 = unbounded */
} nu_synth_options;

typedef struct nu_synth_stats {
  uint64_t model_check_calls;
  uint64_t loop_check_calls;
  uint64_t configs_visited;
  uint64_t configs_pruned_by_cex;
  double wall_time_ms;
} nu_synth_stats;

const char* nu_status_name(nu_status status);
void nu_string_free(char* s);

/* ---- networks ---- */

nu_status nu_network_parse(const char* json_text, nu_network** out, char** error);
nu_status nu_network_load(const char* path, nu_network** out, char** error);
void nu_network_free(nu_network* net);
nu_status nu_network_to_json(const nu_network* net, char** json);
/* Rule-granularity reduction across all policies in the network. */
nu_status nu_network_reduce(const nu_network* net, nu_network** out, char** error);
int nu_network_has_policy(const nu_network* net, const char* name);

/* ---- formulas ---- */

nu_status nu_formula_parse(const char* text, nu_formula** out, char** error);
nu_status nu_formula_load(const char* path, nu_formula** out, char** error);
void nu_formula_free(nu_formula* f);
/* NU_ERR_VALIDATION with one message per unresolved name. */
nu_status nu_formula_resolve(const nu_formula* f, const nu_network* net, char** error);

/* ---- synthesis ---- */

/* NU_OK: *out_plan is the synthesized plan (commands reference the final
 * policy by name). NU_ERR_INFEASIBLE / NU_ERR_PRECONDITION: *out_plan is
 * NULL and *message explains. Stats are filled in every case. */
nu_status nu_synthesize(const nu_network* net, const char* initial_policy,
                        const char* final_policy, const nu_formula* f,
                        const nu_synth_options* options, nu_plan** out_plan,
                        nu_synth_stats* stats, char** message);

nu_status nu_plan_parse(const char* json_text, nu_plan** out, char** error);
nu_status nu_plan_load(const char* path, nu_plan** out, char** error);
void nu_plan_free(nu_plan* plan);
nu_status nu_plan_to_json(const nu_plan* plan, char** json);
uint64_t nu_plan_command_count(const nu_plan* plan);

/* Careful-sequence validation: simple, waits at odd positions, every induced
 * configuration loop-free and satisfying `f`, and (when `final_policy` is
 * non-NULL) ending at the named policy. NU_ERR_VALIDATION carries the first
 * failure, including a counterexample trace when one exists. */
nu_status nu_plan_validate(const nu_network* net, const char* initial_policy,
                           const char* final_policy, const nu_plan* plan,
                           const nu_formula* f, char** diagnostics);

/* Independent transition-system oracle over the same plan; bounded by
 * `max_traces` extracted packet traces. */
nu_status nu_simulate(const nu_network* net, const char* initial_policy,
                      const nu_plan* plan, const nu_formula* f,
                      uint64_t max_traces, char** diagnostics);

/* ---- benchmark generation ---- */

nu_status nu_bench_generate(uint64_t nodes, uint64_t updating,
                            uint64_t ingress_count, int impossible,
                            uint64_t seed, char** network_json,
                            char** spec_text, char** error);

/* ---- NuSMV bridge ---- */

nu_status nu_emit_nusmv(const nu_network* net, const char* policy_name,
                        const nu_formula* f, char** model_text, char** error);

/* Runs the external binary on an emitted model. `verdict_ok` receives 1/0.
 * NU_ERR_UNAVAILABLE when the binary is missing; NU_ERR_VALIDATION when it
 * ran but produced no verdict. */
nu_status nu_run_nusmv(const nu_network* net, const char* policy_name,
                       const nu_formula* f, const char* binary_path,
                       int* verdict_ok, char** detail);

#ifdef __cplusplus
}
#endif

#endif /* NETUPDATE_H_ */
