#ifndef DLS_H
#define DLS_H

/*
 * C interface to the dls library: decision procedures for dynamic logics of
 * agents on the discrete plane.
 *
 * Handles are opaque; every function that can fail returns a dls_status and
 * leaves a human-readable message in dls_last_error() (thread-local). Output
 * strings are owned by the caller and released with dls_string_free().
 */

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef struct dls_formula dls_formula;
typedef struct dls_model dls_model;
typedef struct dls_sat_result dls_sat_result;

typedef enum dls_status {
  DLS_OK = 0,
  DLS_ERR_PARSE = 1,       /* malformed formula or model text */
  DLS_ERR_INVALID_ARG = 2, /* null handle, bad vocabulary reference, ... */
  DLS_ERR_UNSUPPORTED = 3, /* input outside the supported fragment */
  DLS_ERR_BUDGET = 4,      /* search budget exhausted; verdict inconclusive */
  DLS_ERR_INTERNAL = 5
} dls_status;

typedef enum dls_fragment {
  DLS_FRAGMENT_STARFREE = 0,
  DLS_FRAGMENT_POSITIONS = 1
} dls_fragment;

typedef enum dls_verdict {
  DLS_UNSAT = 0,
  DLS_SAT = 1,
  DLS_INCONCLUSIVE = 2
} dls_verdict;

/* Zero fields fall back to the built-in defaults. */
typedef struct dls_budget {
  uint64_t max_atom_cells;
  uint64_t max_nodes;
  uint32_t wall_ms;
} dls_budget;

const char* dls_version(void);
const char* dls_last_error(void);
void dls_string_free(char* s);

/* ------------------------------------------------------------------ *
 * Formulas.  `agents` is a comma-separated list declaring the agent
 * set; pass NULL to infer it from the text.
 * ------------------------------------------------------------------ */
dls_status dls_formula_parse(const char* text, const char* agents,
                             dls_formula** out);
dls_status dls_formula_render(const dls_formula* f, char** out);
int dls_formula_degree(const dls_formula* f);
int dls_formula_size(const dls_formula* f);
/* 1 when the formula contains a perception operator (whose verdicts are
 * computed over a finitized variant window). */
int dls_formula_has_perception(const dls_formula* f);
void dls_formula_free(dls_formula* f);

/* ------------------------------------------------------------------ *
 * Models (text format: bound/agent/atom declarations, '#' comments).
 * ------------------------------------------------------------------ */
dls_status dls_model_parse(const char* text, dls_model** out);
dls_status dls_model_render(const dls_model* m, char** out);
void dls_model_free(dls_model* m);

/* ------------------------------------------------------------------ *
 * Operations.
 * ------------------------------------------------------------------ */

/* Truth at (x,y); *verdict is 1 or 0. */
dls_status dls_check(const dls_model* m, const dls_formula* f, int x, int y,
                     int* verdict);

/* Motion-elimination followed by the star-free program reduction. */
dls_status dls_reduce(const dls_formula* f, dls_formula** out);

dls_status dls_sat(const dls_formula* f, dls_fragment fragment,
                   const dls_budget* budget, dls_sat_result** out);
dls_verdict dls_sat_result_verdict(const dls_sat_result* r);
int dls_sat_result_bound(const dls_sat_result* r);
/* DLS_ERR_INVALID_ARG when the result carries no witness. */
dls_status dls_sat_result_witness(const dls_sat_result* r, dls_model** out);
dls_status dls_sat_result_position(const dls_sat_result* r, int* x, int* y);
const char* dls_sat_result_note(const dls_sat_result* r);
void dls_sat_result_free(dls_sat_result* r);

/* *verdict is 1 (valid) or 0 (invalid); DLS_ERR_BUDGET when inconclusive. */
dls_status dls_valid(const dls_formula* f, dls_fragment fragment,
                     const dls_budget* budget, int* verdict);

/* Depth-bounded bisimilarity of two pointed models over the union of their
 * vocabularies; *result is 1 or 0. */
dls_status dls_bisim(const dls_model* m1, int x1, int y1, const dls_model* m2,
                     int x2, int y2, int depth, int* result);

/* Runs a motion program from the model, printing positions and the optional
 * formula verdict after every joint action; choices take the first branch
 * that is not blocked by a failing test. The trace is returned in *out. */
dls_status dls_simulate(const dls_model* m, const char* program,
                        const dls_formula* formula_or_null, int x, int y,
                        char** out);

/* ------------------------------------------------------------------ *
 * Axiom-schema probing.
 * ------------------------------------------------------------------ */
int dls_schema_count(void);
const char* dls_schema_id(int index);
/* Probes one schema (or all when schema_id is "all"); the line-oriented
 * report is returned in *report and the counterexample total in *counts. */
dls_status dls_probe(const char* schema_id, int trials, uint64_t seed,
                     char** report, int* counterexamples);

#ifdef __cplusplus
}
#endif

#endif /* DLS_H */
