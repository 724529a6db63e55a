#ifndef SPHEREPROX_H
#define SPHEREPROX_H

/* C interface to the spherical proximal-minimization engine. Every entry
 * point reports trouble through a status code; the matching human-readable
 * message is kept per thread and read back with sphereprox_last_error().
 * Strings returned as const char* stay owned by the library (or by the run
 * handle they came from); strings returned through char** are malloc'd and
 * released with sphereprox_free_string(). */

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sphereprox_status {
  SPHEREPROX_OK = 0,
  /* precondition violations: bad numbers, malformed schedules, points
     outside the space */
  SPHEREPROX_ERR_INVALID_INPUT = 1,
  SPHEREPROX_ERR_DIMENSION_MISMATCH = 2,
  /* (near-)antipodal configurations without a unique geodesic */
  SPHEREPROX_ERR_DEGENERATE_GEODESIC = 3,
  /* evaluation outside the admissible domain */
  SPHEREPROX_ERR_DOMAIN = 4,
  SPHEREPROX_ERR_NOT_IMPLEMENTED = 5,
  /* an inner solver ran out of budget */
  SPHEREPROX_ERR_CONVERGENCE_FAILURE = 6,
  /* malformed or inconsistent experiment configuration */
  SPHEREPROX_ERR_CONFIG = 7,
  /* filesystem trouble reading configs or writing outputs */
  SPHEREPROX_ERR_IO = 8,
  SPHEREPROX_ERR_UNKNOWN = 9
} sphereprox_status;

/* Library version, "major.minor.patch". */
const char* sphereprox_version(void);

/* Message for the most recent failing call on this thread; "" when the
 * most recent call succeeded. */
const char* sphereprox_last_error(void);

/* Releases a string handed out through a char** output. */
void sphereprox_free_string(char* s);

/* A finished experiment run: the iteration trace plus the report document,
 * with the configured CSV/JSON files already written. */
typedef struct sphereprox_run sphereprox_run;

/* Runs the experiment described by a JSON config file and writes its two
 * output files. On success *out receives a handle — also when the run ended
 * in a solver failure, which is reported as exit code 1 with the completed
 * prefix in place. Config or filesystem trouble returns a status and leaves
 * *out null. */
sphereprox_status sphereprox_run_config_file(const char* path,
                                             sphereprox_run** out);

/* Same, from an in-memory JSON document. Relative output paths resolve
 * against base_dir when given (null: the working directory). */
sphereprox_status sphereprox_run_config_json(const char* json_text,
                                             const char* base_dir,
                                             sphereprox_run** out);

/* The getters below tolerate a null handle: numeric ones return -1 and
 * string ones return "". */

/* 0 for a clean run, 1 when the run stopped on a solver failure. */
int sphereprox_run_exit_code(const sphereprox_run* h);

/* Failure text for exit code 1; "" for a clean run. */
const char* sphereprox_run_message(const sphereprox_run* h);

/* The report document (same content as the written report file). */
const char* sphereprox_run_report_json(const sphereprox_run* h);

/* Human-readable convergence table with the hypothesis verdicts. */
const char* sphereprox_run_summary(const sphereprox_run* h);

/* Number of completed iteration steps (CSV rows). */
int sphereprox_run_step_count(const sphereprox_run* h);

/* Ambient coordinate count of the points (iterates live on the unit
 * sphere of this dimension). */
int sphereprox_run_point_dim(const sphereprox_run* h);

/* Copies step record i (0-based) into out_record as
 * {n, alpha_n, lambda_n, step_dist, f_x, f_z, dist_to_min, dist_to_Pv};
 * absent reference distances come back as NaN. */
sphereprox_status sphereprox_run_step_record(const sphereprox_run* h, int i,
                                             double out_record[8]);

/* Copies iterate i (0-based; step_count+1 iterates, starting point first)
 * into coords, which must hold point_dim values. */
sphereprox_status sphereprox_run_iterate(const sphereprox_run* h, int i,
                                         double* coords, int coords_len);

void sphereprox_run_free(sphereprox_run* h);

/* Runs the named invariant sweep ("geometry", "functions", "resolvent",
 * "diagnostics", or "all") with deterministic seeding. pass_out receives
 * 1/0; report_json_out receives the malloc'd report document. samples <= 0
 * selects the default count; tolerance_override may be null. */
sphereprox_status sphereprox_check_invariants(const char* suite,
                                              uint64_t seed, int samples,
                                              const double* tolerance_override,
                                              char** report_json_out,
                                              int* pass_out);

#ifdef __cplusplus
}
#endif

#endif
