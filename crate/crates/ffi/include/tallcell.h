/* C interface to the tallcell coverage and capacity planning engine. */

#ifndef TALLCELL_H
#define TALLCELL_H

/* Generated by cbindgen from tallcell-ffi; do not edit by hand. */

#include <stdarg.h>
#include <stdbool.h>
#include <stddef.h>
#include <stdint.h>
#include <stdlib.h>

// Status codes returned by every fallible call.
typedef enum TcStatus {
  TC_OK = 0,
  TC_INVALID_ARGUMENT = 1,
  TC_DOMAIN_ERROR = 2,
  TC_DEGENERATE_SPREAD = 3,
  TC_NUMERICAL_ERROR = 4,
  TC_PARSE_ERROR = 5,
  TC_IO_ERROR = 6,
  TC_NULL_POINTER = 7,
  TC_INVALID_UTF8 = 8,
  TC_PANIC = 9,
} TcStatus;

// Opaque terrain raster handle.
typedef struct TcGrid TcGrid;

// Opaque RSRP raster handle.
typedef struct TcRsrpMap TcRsrpMap;

// Link-budget inputs; temperatures in kelvin, powers in dBm, gains in dBi.
typedef struct TcLinkBudget {
  double tx_power_dbm;
  double tx_gain_dbi;
  double rx_gain_dbi;
  double pathloss_db;
  double bandwidth_hz;
  double noise_figure_db;
  double temperature_k;
} TcLinkBudget;

typedef struct TcLinkBudgetResult {
  double rx_power_dbm;
  double noise_power_dbm;
  double snr_db;
} TcLinkBudgetResult;

// Empirical pathloss coefficients (see the library documentation for the
// model form).
typedef struct TcSpmParams {
  double k1_los;
  double k2_los;
  double k1_nlos;
  double k2_nlos;
  double k3;
  double k4;
  double k5;
  double k6;
  double k7;
  double k_clutter;
  double f_clutter;
  double k_hill_los;
} TcSpmParams;

// Site description for heatmap generation over a grid. `pattern_kind` is
// 0 for rectangular sectors, 1 for gaussian.
typedef struct TcSite {
  double x_m;
  double y_m;
  double tower_height_m;
  size_t n_sectors;
  double peak_gain_dbi;
  int pattern_kind;
  double tx_power_dbm;
  double f_mhz;
  double rx_height_m;
  struct TcSpmParams spm;
} TcSite;

#ifdef __cplusplus
extern "C" {
#endif // __cplusplus

// Library version as a static NUL-terminated string.
const char *tc_version(void);

// Copies the last error message on this thread into `buf` (truncated to
// `len - 1` bytes, always NUL-terminated) and returns the full message
// length in bytes.
//
// # Safety
// `buf` must point to `len` writable bytes, or be null (the call then only
// reports the length).
size_t tc_last_error(char *buf, size_t len);

// Thermal noise power 10*log10(kTB/1mW).
//
// # Safety
// `out_dbm` must be a valid pointer.
enum TcStatus tc_noise_power_dbm(double bandwidth_hz, double temperature_k, double *out_dbm);

// Evaluates a link budget.
//
// # Safety
// `input` and `out` must be valid pointers.
enum TcStatus tc_evaluate_link_budget(const struct TcLinkBudget *input,
                                      struct TcLinkBudgetResult *out);

// Maximum allowable pathloss at the given minimum SNR.
//
// # Safety
// `input` and `out_db` must be valid pointers.
enum TcStatus tc_mapl_db(const struct TcLinkBudget *input, double snr_min_db, double *out_db);

// 3-dB beamwidth in degrees for a peak gain; pass `x_eta_deg2 <= 0` for the
// built-in default constant.
//
// # Safety
// `out_deg` must be a valid pointer.
enum TcStatus tc_beamwidth_from_gain(double gain_dbi, double x_eta_deg2, double *out_deg);

// Fills `out` with the tuned coefficient set for 728 or 2500 MHz.
//
// # Safety
// `out` must be a valid pointer.
enum TcStatus tc_spm_tuned(double band_mhz, struct TcSpmParams *out);

// Friis free-space pathloss in dB.
//
// # Safety
// `out_db` must be a valid pointer.
enum TcStatus tc_fspl_db(double d_m, double f_mhz, double *out_db);

// Evaluates the empirical pathloss model for one path.
//
// # Safety
// `params` and `out_db` must be valid pointers.
enum TcStatus tc_spm_pathloss_db(const struct TcSpmParams *params,
                                 double d_m,
                                 double h_tx_m,
                                 double h_rx_m,
                                 int is_los,
                                 double l_diff_db,
                                 double *out_db);

// Single knife-edge loss J(nu) in dB; total function, no error cases.
double tc_knife_edge_loss_db(double nu);

// Per-sector CINR in dB for a uniform N-sector plan.
//
// # Safety
// `out_db` must be a valid pointer.
enum TcStatus tc_cinr_db(size_t n_sectors, double sigma_deg, double total_cnr_db, double *out_db);

// Per-sector CNR in dB (interference removed).
//
// # Safety
// `out_db` must be a valid pointer.
enum TcStatus tc_cnr_db(size_t n_sectors, double sigma_deg, double total_cnr_db, double *out_db);

// Shannon total capacity in bit/s across all sectors.
//
// # Safety
// `out_bps` must be a valid pointer.
enum TcStatus tc_total_capacity_bps(size_t n_sectors,
                                    double bandwidth_hz,
                                    double sigma_deg,
                                    double total_cnr_db,
                                    double *out_bps);

// Fills caller-allocated arrays of length `n_max` with the capacity curve
// for N = 1..=n_max. Any of the output arrays may be null to skip it.
//
// # Safety
// Non-null output arrays must hold at least `n_max` doubles.
enum TcStatus tc_capacity_curve(double sigma_deg,
                                double bandwidth_hz,
                                double total_cnr_db,
                                size_t n_max,
                                double *out_cinr_db,
                                double *out_cnr_db,
                                double *out_c_tot_bps);

// Loads an ESRI ASCII grid; returns null on failure (see [`tc_last_error`]).
//
// # Safety
// `path` must be a NUL-terminated string.
struct TcGrid *tc_grid_load(const char *path);

// Releases a grid handle; null is ignored.
//
// # Safety
// `grid` must have come from [`tc_grid_load`] and not been freed already.
void tc_grid_free(struct TcGrid *grid);

// Reports the raster dimensions; null outputs are skipped.
//
// # Safety
// `grid` must be a live handle; non-null outputs must be valid pointers.
enum TcStatus tc_grid_dims(const struct TcGrid *grid,
                           size_t *out_cols,
                           size_t *out_rows,
                           double *out_cell_size_m);

// Computes an RSRP map for `site` over `grid`; returns null on failure.
//
// # Safety
// `grid` must be a live handle and `site` a valid pointer.
struct TcRsrpMap *tc_rsrp_map_compute(const struct TcGrid *grid, const struct TcSite *site);

// Releases an RSRP map handle; null is ignored.
//
// # Safety
// `map` must have come from [`tc_rsrp_map_compute`] and not been freed.
void tc_rsrp_map_free(struct TcRsrpMap *map);

// Covered area at a threshold, in square kilometres.
//
// # Safety
// `map` must be a live handle and `out_km2` a valid pointer.
enum TcStatus tc_rsrp_map_coverage_area_km2(const struct TcRsrpMap *map,
                                            double threshold_dbm,
                                            double *out_km2);

// Minimum and maximum RSRP over valid cells.
//
// # Safety
// `map` must be a live handle; non-null outputs must be valid pointers.
enum TcStatus tc_rsrp_map_range(const struct TcRsrpMap *map,
                                double *out_min_dbm,
                                double *out_max_dbm);

// Writes the map as an ESRI ASCII raster (RSRP in dBm, one decimal).
//
// # Safety
// `map` must be a live handle and `path` a NUL-terminated string.
enum TcStatus tc_rsrp_map_save_asc(const struct TcRsrpMap *map, const char *path);

#ifdef __cplusplus
}  // extern "C"
#endif  // __cplusplus

#endif  /* TALLCELL_H */
