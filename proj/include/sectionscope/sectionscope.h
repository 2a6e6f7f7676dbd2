#ifndef SECTIONSCOPE_H
#define SECTIONSCOPE_H

#include <stddef.h>
#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(SECTIONSCOPE_BUILD)
#define SS_API __attribute__((visibility("default")))
#else
#define SS_API
#endif

/* Status codes. Stable ABI values. */
typedef enum ss_status {
  SS_OK = 0,
  SS_INVALID_ARGUMENT = 1,
  SS_COLLISION = 2,
  SS_BINDING = 3,
  SS_NO_CROSSING = 4,
  SS_MAX_TIME = 5,
  SS_STEP_UNDERFLOW = 6,
  SS_NO_CONVERGENCE = 7,
  SS_JACOBIAN_SINGULAR = 8,
  SS_FOLD_DETECTED = 9,
  SS_ASSUMPTION_VIOLATION = 10,
  SS_CONSTRAINT_DRIFT = 11,
  SS_PERTURBATION_ESCAPE = 12,
  SS_BRACKET_FAILURE = 13,
  SS_OFF_SURFACE = 14,
  SS_IO = 15,
  SS_INTERNAL = 16
} ss_status;

SS_API const char* ss_version(void);
SS_API const char* ss_status_name(int status);
/* Message of the last failed call on this thread; "" if none. */
SS_API const char* ss_last_error(void);

/* ---- context: validated run configuration ---------------------------- */

typedef struct ss_context ss_context;

/* config_json: RunConfig object (strict; NULL or "" means defaults).
   command_line is stamped into output files and may be NULL. */
SS_API int ss_context_create(const char* config_json, const char* command_line, ss_context** out);
SS_API void ss_context_destroy(ss_context* ctx);
SS_API double ss_context_mu(const ss_context* ctx);
/* The configured energy, or the default (H(L1) - 0.1, or -2 at mu = 0). */
SS_API int ss_context_energy(const ss_context* ctx, double* c);
SS_API const char* ss_context_config_hash(const ss_context* ctx);
/* Canonical config JSON; valid until the context is destroyed. */
SS_API const char* ss_context_config_json(const ss_context* ctx);

/* ---- Lagrange points ---------------------------------------------------- */

/* points: 15 doubles (L1..L5, xyz), energies: 5 doubles. Either may be NULL. */
SS_API int ss_lagrange(const ss_context* ctx, double* points, double* energies, int* ordering_ok);
SS_API int ss_lagrange_write(const ss_context* ctx, const char* json_path, int* ordering_ok);

/* ---- Hill regions ------------------------------------------------------- */

typedef struct ss_hill ss_hill;

/* Box [-2, 2]^d. planar != 0 samples the q3 = 0 slice. */
SS_API int ss_hill_compute(const ss_context* ctx, int resolution, int planar, ss_hill** out);
SS_API void ss_hill_destroy(ss_hill* h);
SS_API int ss_hill_components(const ss_hill* h);
SS_API int ss_hill_bounded_components(const ss_hill* h);
SS_API int ss_hill_resolution_warning(const ss_hill* h);
SS_API int ss_hill_write(const ss_hill* h, const char* csv_path, const char* json_path);

/* ---- trajectories ------------------------------------------------------- */

typedef struct ss_trajectory ss_trajectory;

/* state: rotating (q, p). */
SS_API int ss_integrate(const ss_context* ctx, const double* state, double duration, ss_trajectory** out);
SS_API void ss_trajectory_destroy(ss_trajectory* t);
SS_API size_t ss_trajectory_size(const ss_trajectory* t);
SS_API double ss_trajectory_energy_drift(const ss_trajectory* t);
SS_API int ss_trajectory_chart_switches(const ss_trajectory* t);
/* rot_state: 6 doubles, the sample in rotating coordinates. */
SS_API int ss_trajectory_sample(const ss_trajectory* t, size_t i, double* time, double* rot_state, double* energy);
SS_API int ss_trajectory_write_jsonl(const ss_trajectory* t, const char* path);

/* ---- section scans ------------------------------------------------------ */

typedef struct ss_scan ss_scan;

typedef struct ss_scan_row {
  int index;
  double x[6];
  double fx[6];
  double tau;
  double energy;
  double energy_error;
  double symplecticity; /* NaN unless Jacobians were requested */
  double leaf_delta;
  double min_binding;
  int binding_warning;
  int error; /* ss_status of the failed point, SS_OK otherwise */
} ss_scan_row;

/* n random page points at the configured energy and page; primary 0 Earth, 1 Moon. */
SS_API int ss_section_scan(const ss_context* ctx, int n, int primary, int jacobians, ss_scan** out);
SS_API void ss_scan_destroy(ss_scan* s);
SS_API size_t ss_scan_size(const ss_scan* s);
SS_API int ss_scan_row_get(const ss_scan* s, size_t i, ss_scan_row* row);
/* Points with |leaf delta| < delta. */
SS_API size_t ss_scan_recurrent(const ss_scan* s, double delta);
SS_API int ss_scan_write_csv(const ss_scan* s, const char* path);

/* Ellipsoid oracle: n random page points of E(a, b); writes a CSV with the
   measured and predicted page rotation; max_error may be NULL. */
SS_API int ss_ellipsoid_scan(const ss_context* ctx, double a, double b, int n, const char* csv_path,
                             double* max_error);

/* ---- periodic orbits ---------------------------------------------------- */

typedef struct ss_orbit ss_orbit;

/* mode: "vertical-collision" (guess ignored; seeded at mu = 0 and continued
   to the configured mu), "retrograde" / "direct" (guess[0] = q1 or NULL for a
   default next to the Moon), "page" (guess = 6 rotating components on the
   configured page, iterates >= 1). */
SS_API int ss_find_orbit(const ss_context* ctx, const char* mode, const double* guess, int iterates, double tol,
                         ss_orbit** out);
SS_API void ss_orbit_destroy(ss_orbit* o);
SS_API int ss_orbit_floquet(const ss_context* ctx, ss_orbit* o);

typedef struct ss_orbit_summary {
  double representative[6];
  double period;
  double energy;
  double mu;
  double residual;
  double closure_error;
  double min_binding;
  double max_vertical;
  double angular_momentum;
  int newton_iterations;
  int floquet_count;
  double floquet_reciprocal_residual;
  int floquet_ill_conditioned;
  const char* symmetry;
} ss_orbit_summary;

SS_API int ss_orbit_get(const ss_orbit* o, ss_orbit_summary* out);
/* re, im: arrays of ss_orbit_summary.floquet_count doubles. */
SS_API int ss_orbit_floquet_values(const ss_orbit* o, double* re, double* im);
SS_API int ss_orbit_write_json(const ss_context* ctx, const ss_orbit* o, const char* path);

typedef struct ss_family ss_family;

/* param: "mu" or "c". On a fold the family keeps the members found and
   ss_family_stop_code reports SS_FOLD_DETECTED; the call itself succeeds. */
SS_API int ss_continue(const ss_context* ctx, const ss_orbit* seed, const char* param, double step, int count,
                       ss_family** out);
SS_API void ss_family_destroy(ss_family* f);
SS_API size_t ss_family_size(const ss_family* f);
SS_API int ss_family_complete(const ss_family* f);
SS_API int ss_family_stop_code(const ss_family* f);
SS_API const char* ss_family_stop_reason(const ss_family* f);
/* Borrowed; valid while the family lives. */
SS_API const ss_orbit* ss_family_member(const ss_family* f, size_t i);
SS_API int ss_family_write_json(const ss_context* ctx, const ss_family* f, const char* path);

/* ---- verification ------------------------------------------------------- */

typedef struct ss_report ss_report;

/* suite: "default" or "a3-fixture". tol is the energy-drift threshold
   (relative, over 100 time units); <= 0 uses 1e-9. */
SS_API int ss_verify(const ss_context* ctx, const char* suite, double tol, ss_report** out);
SS_API void ss_report_destroy(ss_report* r);
SS_API int ss_report_passed(const ss_report* r);
SS_API size_t ss_report_size(const ss_report* r);
SS_API int ss_report_check(const ss_report* r, size_t i, const char** name, int* passed, double* value,
                           double* tolerance);
SS_API int ss_report_write_json(const ss_context* ctx, const ss_report* r, const char* path);

#ifdef __cplusplus
}
#endif

#endif
