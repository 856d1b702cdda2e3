/* rdtlgn: recurrent ternary logic gate network monitor library.
 *
 * C interface over the C++ core. All objects are opaque handles created and
 * destroyed through this API; functions return RDTLGN_OK (0) on success and
 * a nonzero status otherwise, with a thread-local message available from
 * rdtlgn_last_error(). Strings returned through char** are heap-allocated
 * and must be released with rdtlgn_string_free().
 *
 * Structured inputs (experiment/dataset/training configuration) and outputs
 * (reports, histories, censuses) travel as JSON text.
 */

#ifndef RDTLGN_H
#define RDTLGN_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum rdtlgn_status {
  RDTLGN_OK = 0,
  RDTLGN_ERR_INVALID_ARG = 1,
  RDTLGN_ERR_PARSE = 2,   /* formula / config / file-format errors */
  RDTLGN_ERR_RUNTIME = 3,
  RDTLGN_ERR_IO = 4
} rdtlgn_status;

typedef struct rdtlgn_formula rdtlgn_formula;
typedef struct rdtlgn_dataset rdtlgn_dataset;
typedef struct rdtlgn_cell rdtlgn_cell;       /* trained soft cell */
typedef struct rdtlgn_circuit rdtlgn_circuit; /* hardened ternary circuit */
typedef struct rdtlgn_monitor rdtlgn_monitor; /* streaming inference state */

const char* rdtlgn_version(void);

/* Message for the most recent failure on this thread; never NULL. */
const char* rdtlgn_last_error(void);

void rdtlgn_string_free(char* s);

/* ------------------------------------------------------------------ */
/* Formulas                                                            */

rdtlgn_status rdtlgn_formula_parse(const char* text, rdtlgn_formula** out);
void rdtlgn_formula_free(rdtlgn_formula* f);
rdtlgn_status rdtlgn_formula_format(const rdtlgn_formula* f, char** out);
/* {"B": <state complexity>, "depth": <layer bound>, "horizon": <steps>} */
rdtlgn_status rdtlgn_formula_bounds_json(const rdtlgn_formula* f, char** out);

/* ------------------------------------------------------------------ */
/* Gate library audit                                                  */

/* Vocabulary cardinalities; with include_ids != 0 the JSON also carries the
 * sorted gate-id arrays for NM, IM and NM_AND_IM. */
rdtlgn_status rdtlgn_gate_audit_json(int exclude_constants, int include_ids, char** out);

/* ------------------------------------------------------------------ */
/* Datasets                                                            */

/* config_json: experiment config (formula, delta, data section, seed). */
rdtlgn_status rdtlgn_dataset_generate(const char* config_json, int64_t seed_override,
                                      rdtlgn_dataset** out);
rdtlgn_status rdtlgn_dataset_save(const rdtlgn_dataset* ds, const char* dir);
rdtlgn_status rdtlgn_dataset_load(const char* dir, rdtlgn_dataset** out);
rdtlgn_status rdtlgn_dataset_info_json(const rdtlgn_dataset* ds, char** out);
void rdtlgn_dataset_free(rdtlgn_dataset* ds);

/* ------------------------------------------------------------------ */
/* Training and hardening                                              */

/* Trains one soft cell on the dataset under the config's pipeline.
 * history_json_out (optional) receives the per-epoch records. */
rdtlgn_status rdtlgn_train(const char* config_json, const rdtlgn_dataset* ds,
                           int64_t seed_override, rdtlgn_cell** out, char** history_json_out);
rdtlgn_status rdtlgn_cell_save(const rdtlgn_cell* cell, const char* path);
rdtlgn_status rdtlgn_cell_load(const char* path, rdtlgn_cell** out);
void rdtlgn_cell_free(rdtlgn_cell* cell);

/* Two-phase trajectory distillation; report_json_out (optional) receives
 * both phase reports. */
rdtlgn_status rdtlgn_harden(const char* config_json, const rdtlgn_dataset* ds,
                            const rdtlgn_cell* cell, rdtlgn_circuit** out,
                            char** report_json_out);
rdtlgn_status rdtlgn_circuit_save(const rdtlgn_circuit* c, const char* path);
rdtlgn_status rdtlgn_circuit_load(const char* path, rdtlgn_circuit** out);
rdtlgn_status rdtlgn_circuit_census_json(const rdtlgn_circuit* c, char** out);
rdtlgn_status rdtlgn_circuit_shape(const rdtlgn_circuit* c, int* P, int* S, int* K, int* L);
void rdtlgn_circuit_free(rdtlgn_circuit* c);

/* ------------------------------------------------------------------ */
/* Evaluation                                                          */

/* Metrics of a hardened circuit on the dataset's eval split. */
rdtlgn_status rdtlgn_evaluate(const char* config_json, const rdtlgn_dataset* ds,
                              const rdtlgn_circuit* c, char** report_json_out);

/* Full pipeline: generate, label, train both pipelines, harden, evaluate
 * against the causal and RNN baselines; artifacts written under outdir.
 * summary_out (optional) receives the rendered table. */
rdtlgn_status rdtlgn_run_experiment(const char* config_json, const char* outdir,
                                    int64_t seed_override, char** summary_out);

/* ------------------------------------------------------------------ */
/* Streaming monitor                                                   */

rdtlgn_status rdtlgn_monitor_create(const rdtlgn_circuit* c, rdtlgn_monitor** out);
/* p: P trits in {-1,0,+1}; verdict_out: K trits. */
rdtlgn_status rdtlgn_monitor_step(rdtlgn_monitor* m, const int8_t* p, size_t p_len,
                                  int8_t* verdict_out, size_t verdict_len);
rdtlgn_status rdtlgn_monitor_reset(rdtlgn_monitor* m);
void rdtlgn_monitor_free(rdtlgn_monitor* m);

#ifdef __cplusplus
} /* extern "C" */
#endif

#endif /* RDTLGN_H */
