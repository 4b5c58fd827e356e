/* C interface for the accelerated-degradation-test planning library.
 *
 * All entry points return an adt_status; ADT_OK means success. On failure a
 * thread-local message is available through adt_last_error(). Strings
 * returned through char** are heap-allocated and must be released with
 * adt_string_free(); handles are released with their matching *_free().
 */
#ifndef ADT_H
#define ADT_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

#if defined(_WIN32)
#define ADT_API __declspec(dllexport)
#else
#define ADT_API __attribute__((visibility("default")))
#endif

typedef enum adt_status {
    ADT_OK = 0,
    ADT_ERR_INPUT = 2,       /* parse errors, domain violations, bad arguments */
    ADT_ERR_DEGENERATE = 3,  /* degenerate quantile or variance */
    ADT_ERR_VALIDATION = 4,  /* Monte Carlo validation flagged unreliable */
    ADT_ERR_SINGULAR = 5,    /* singular information or design matrices */
    ADT_ERR_INTERNAL = 6
} adt_status;

typedef struct adt_scenario adt_scenario;
typedef struct adt_design adt_design;

ADT_API const char* adt_version(void);
ADT_API const char* adt_last_error(void);
ADT_API void adt_string_free(char* s);

/* ---- scenarios ---------------------------------------------------------- */
ADT_API adt_status adt_scenario_parse(const char* json_text, adt_scenario** out);
ADT_API adt_status adt_scenario_load(const char* path, adt_scenario** out);
ADT_API void adt_scenario_free(adt_scenario* s);

/* ---- designs as opaque handles ------------------------------------------ */
ADT_API adt_status adt_design_parse_csv(const char* csv_text, adt_design** out);
ADT_API adt_status adt_design_load_csv(const char* path, adt_design** out);
ADT_API adt_status adt_design_csv(const adt_design* d, char** csv_out);
ADT_API void adt_design_free(adt_design* d);

/* ---- failure time -------------------------------------------------------- */
ADT_API adt_status adt_failure_time(const adt_scenario* s, double alpha,
                                    char** report_json);
ADT_API adt_status adt_failure_time_curve(const adt_scenario* s, double t_max,
                                          int points, char** csv_out);

/* ---- design optimization -------------------------------------------------
 * grid_points: candidate points per stress axis (0 selects the default 101).
 * with_benchmarks adds uniform-design efficiencies to the report.
 */
ADT_API adt_status adt_design_stress(const adt_scenario* s, int grid_points,
                                     int with_benchmarks, adt_design** design_out,
                                     char** report_json);

/* delta/k <= 0 fall back to the scenario's time_grid; profile_csv_out may be
 * NULL. tau0_out receives the adjusted exact k-point plan. */
ADT_API adt_status adt_design_time(const adt_scenario* s, double delta, int k,
                                   long max_iter, double tol,
                                   adt_design** tau_out, adt_design** tau0_out,
                                   char** report_json, char** profile_csv_out);

ADT_API adt_status adt_design_destructive(const adt_scenario* s, int grid_points,
                                          adt_design** design_out, char** report_json);

/* Two CSV curves (probe axis t_half and sigma ratio). */
ADT_API adt_status adt_sensitivity(const adt_scenario* s, int points,
                                   char** t_half_csv_out, char** ratio_csv_out);

/* ---- evaluation ----------------------------------------------------------
 * family: "stress", "time" (needs k) or "destructive". Reports the criterion,
 * the efficiency against the computed optimum, and the certificate gap.
 */
ADT_API adt_status adt_efficiency(const adt_scenario* s, const adt_design* d,
                                  const char* family, int k, char** report_json);

/* ---- simulation and Monte Carlo validation -------------------------------
 * design may be NULL (the optimal stress design is used). time plan comes
 * from the scenario unless a k-point plan is supplied.
 */
ADT_API adt_status adt_validate(const adt_scenario* s, const adt_design* design,
                                long n_units, long replications, uint64_t seed,
                                double alpha, char** report_json,
                                char** replicates_csv_out);

ADT_API adt_status adt_simulate(const adt_scenario* s, const adt_design* design,
                                long n_units, uint64_t seed, char** observations_csv);

#ifdef __cplusplus
}
#endif

#endif /* ADT_H */
