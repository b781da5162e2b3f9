#ifndef BVPP_FFI_H
#define BVPP_FFI_H

/* Generated by cbindgen from src/lib.rs; do not edit. */

#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>

typedef enum BvppStatus {
  BVPP_STATUS_OK = 0,
  BVPP_STATUS_NULL_ARGUMENT = 1,
  BVPP_STATUS_INVALID_UTF8 = 2,
  BVPP_STATUS_CONFIG = 3,
  BVPP_STATUS_INVALID_INPUT = 4,
  BVPP_STATUS_INFEASIBLE = 5,
  BVPP_STATUS_IO = 6,
  BVPP_STATUS_STRICT = 7,
  BVPP_STATUS_STAGE = 8,
  BVPP_STATUS_PANIC = 9,
} BvppStatus;

/**
 * Result of a fuzzy c-means run.
 */
typedef struct BvppFcm BvppFcm;

/**
 * A validated scenario.
 */
typedef struct BvppScenario BvppScenario;

typedef struct BvppSettlement {
  double market_revenue;
  double total_payments;
  double operator_profit;
  double pass_through_revenue;
} BvppSettlement;

typedef struct BvppCampaign {
  /**
   * $ per day.
   */
  double total;
  double mean;
  size_t targets;
  size_t recommended;
  bool mean_defined;
} BvppCampaign;

typedef struct BvppCost {
  double c_tou;
  double r_fi;
  double f;
} BvppCost;

typedef struct BvppBessSpec {
  double capacity_kwh;
  double max_charge_kw;
  double max_discharge_kw;
  double eta_c;
  double eta_d;
  double soc_min_kwh;
  double soc_max_kwh;
  double soc_init_kwh;
} BvppBessSpec;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

/**
 * Copies the calling thread's last error message (NUL-terminated, truncated to fit) into
 * `buf` and returns the full message length in bytes, excluding the terminator.
 *
 * # Safety
 * `buf` must be null or point to `len` writable bytes.
 */
size_t bvpp_last_error_message(char *buf, size_t len);

/**
 * Toolkit version as a static NUL-terminated string.
 */
const char *bvpp_version(void);

/**
 * Loads and validates a TOML scenario file. `seed` may be null; otherwise it overrides the
 * configured seed.
 *
 * # Safety
 * `path` must be a NUL-terminated string, `seed` null or valid, `out` writable.
 */
enum BvppStatus bvpp_scenario_load(const char *path,
                                   const uint64_t *seed,
                                   struct BvppScenario **out);

/**
 * Parses a scenario from TOML text. Relative file paths resolve against `base_dir`
 * (null means the current directory).
 *
 * # Safety
 * `toml` and non-null `base_dir` must be NUL-terminated; `seed` null or valid; `out` writable.
 */
enum BvppStatus bvpp_scenario_from_toml(const char *toml,
                                        const char *base_dir,
                                        const uint64_t *seed,
                                        struct BvppScenario **out);

/**
 * # Safety
 * `scenario` must come from a `bvpp_scenario_*` constructor and not be used afterwards.
 */
void bvpp_scenario_free(struct BvppScenario *scenario);

/**
 * # Safety
 * `scenario` must be a live handle or null (returns 0).
 */
size_t bvpp_scenario_household_count(const struct BvppScenario *scenario);

/**
 * Writes the 64-hex-digit config hash plus terminator; `buf` needs 65 bytes.
 *
 * # Safety
 * `scenario` live, `buf` pointing to `len` writable bytes.
 */
enum BvppStatus bvpp_scenario_config_hash(const struct BvppScenario *scenario,
                                          char *buf,
                                          size_t len);

/**
 * Writes the per-household profile CSVs under `out_dir`.
 *
 * # Safety
 * `scenario` live, `out_dir` NUL-terminated.
 */
enum BvppStatus bvpp_run_generate(const struct BvppScenario *scenario, const char *out_dir);

/**
 * Runs the market-participation case and writes its artifacts under `out_dir`.
 *
 * # Safety
 * `scenario` live, `out_dir` NUL-terminated, `out` writable.
 */
enum BvppStatus bvpp_run_case1(const struct BvppScenario *scenario,
                               const char *out_dir,
                               bool strict,
                               struct BvppSettlement *out);

/**
 * Runs the knowledge-sharing case and writes its artifacts under `out_dir`.
 *
 * # Safety
 * `scenario` live, `out_dir` NUL-terminated, `out` writable.
 */
enum BvppStatus bvpp_run_case2(const struct BvppScenario *scenario,
                               const char *out_dir,
                               bool strict,
                               struct BvppCampaign *out);

/**
 * Import cost, feed-in revenue and their difference for `n` intervals of
 * `interval_minutes` each (`n` must cover whole days).
 *
 * # Safety
 * All input arrays must hold `n` values; `out` writable.
 */
enum BvppStatus bvpp_cost_breakdown(const double *consumption_kw,
                                    const double *solar_kw,
                                    const double *tou,
                                    const double *fit,
                                    const double *market_price,
                                    size_t n,
                                    uint32_t interval_minutes,
                                    struct BvppCost *out);

/**
 * Revenue-maximizing battery dispatch over `n` intervals on a lattice of `levels` SOC
 * levels. `charge_kw`, `discharge_kw` and `bids_kwh` receive `n` values, `soc_kwh`
 * receives `n + 1` (initial state first). Any output array may be null to skip it.
 *
 * # Safety
 * Inputs hold `n` values; non-null outputs have the sizes above; `spec` and `revenue` valid.
 */
enum BvppStatus bvpp_optimize_bess(const double *surplus_kw,
                                   const double *prices,
                                   size_t n,
                                   uint32_t interval_minutes,
                                   const struct BvppBessSpec *spec,
                                   size_t levels,
                                   double *charge_kw,
                                   double *discharge_kw,
                                   double *soc_kwh,
                                   double *bids_kwh,
                                   double *revenue);

/**
 * Clusters `n` points of dimension `dim` (row-major). Pass `tol <= 0` or `max_iter == 0`
 * for the defaults (1e-6, 300).
 *
 * # Safety
 * `points` holds `n * dim` values; `out` writable.
 */
enum BvppStatus bvpp_fcm_run(const double *points,
                             size_t n,
                             size_t dim,
                             size_t clusters,
                             double fuzzifier,
                             double tol,
                             size_t max_iter,
                             uint64_t seed,
                             struct BvppFcm **out);

/**
 * # Safety
 * `result` must come from [`bvpp_fcm_run`] and not be used afterwards.
 */
void bvpp_fcm_free(struct BvppFcm *result);

/**
 * # Safety
 * `result` live or null (returns 0).
 */
size_t bvpp_fcm_iterations(const struct BvppFcm *result);

/**
 * # Safety
 * `result` live or null (returns NaN).
 */
double bvpp_fcm_objective(const struct BvppFcm *result);

/**
 * Copies the `n x clusters` membership matrix, row-major.
 *
 * # Safety
 * `result` live; `out` holds `len` values.
 */
enum BvppStatus bvpp_fcm_membership(const struct BvppFcm *result, double *out, size_t len);

/**
 * Copies the `clusters x dim` centroid matrix, row-major.
 *
 * # Safety
 * `result` live; `out` holds `len` values.
 */
enum BvppStatus bvpp_fcm_centroids(const struct BvppFcm *result, double *out, size_t len);

/**
 * Copies the `n` hard labels.
 *
 * # Safety
 * `result` live; `out` holds `len` values.
 */
enum BvppStatus bvpp_fcm_labels(const struct BvppFcm *result, size_t *out, size_t len);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* BVPP_FFI_H */
