/* C interface to the spherical CUSUM toolkit: opaque handles, status codes,
 * thread-local error text. All functions returning sc_status set
 * sc_last_error() on failure. Strings returned through char** are owned by
 * the caller and released with sc_string_free(). */
#ifndef SPHCUSUM_H
#define SPHCUSUM_H

#include <stdint.h>

#ifdef __cplusplus
extern "C" {
#endif

typedef enum sc_status {
    SC_OK = 0,
    SC_ERR_INVALID = 1, /* bad arguments or precondition violations */
    SC_ERR_RUNTIME = 2  /* model, data, or I/O failure */
} sc_status;

const char *sc_version(void);
const char *sc_last_error(void);
void sc_string_free(char *s);

typedef struct sc_panel sc_panel;
typedef struct sc_quantile_table sc_quantile_table;
typedef struct sc_surface sc_surface;

/* --- coefficient panels --- */

/* hypothesis: "h0" (static mean) or "h1" (trend with exponent alpha);
 * model: 1, 2, or 3; spectrum_rule: "llp1" or "power_law" (eta used only
 * for the latter); temporal_kind: "iid" or "ar1" (phi used only for ar1). */
sc_status sc_panel_simulate(const char *hypothesis, int model, double alpha,
                            int n_times, int lmax, uint64_t seed,
                            const char *spectrum_rule, double c0, double eta,
                            const char *temporal_kind, double phi, sc_panel **out);

/* Reads CSV (`ell,m,t,value`) or the binary format, by magic bytes. */
sc_status sc_panel_read(const char *path, sc_panel **out);
sc_status sc_panel_write_csv(const sc_panel *panel, const char *path);
sc_status sc_panel_write_binary(const sc_panel *panel, const char *path);
int sc_panel_lmax(const sc_panel *panel);
int sc_panel_n_times(const sc_panel *panel);
double sc_panel_value(const sc_panel *panel, int ell, int m, int t);
void sc_panel_free(sc_panel *panel);

/* --- sup-norm quantile calibration --- */

sc_status sc_quantiles_estimate(int grid, long inner_n, int draws,
                                const double *levels, int n_levels, uint64_t seed,
                                int n_threads, sc_quantile_table **out);
sc_status sc_quantiles_read(const char *path, sc_quantile_table **out);
/* Serializes {levels, thresholds, grid, inner_n, draws, seed}. */
sc_status sc_quantiles_to_json(const sc_quantile_table *table, char **out_json);
int sc_quantiles_n_levels(const sc_quantile_table *table);
double sc_quantiles_level(const sc_quantile_table *table, int i);
double sc_quantiles_threshold(const sc_quantile_table *table, int i);
void sc_quantiles_free(sc_quantile_table *table);

/* --- CUSUM statistic --- */

sc_status sc_surface_compute(const sc_panel *panel, int lmin, int grid_r,
                             int grid_s, sc_surface **out);
double sc_surface_sup(const sc_surface *surface);
sc_status sc_surface_write_csv(const sc_surface *surface, const char *path);
/* {N, L, lmin, grid_r, grid_s, sup} */
sc_status sc_surface_meta_json(const sc_surface *surface, char **out_json);
void sc_surface_free(sc_surface *surface);

/* reject (0/1) iff sup strictly exceeds the threshold at level. */
sc_status sc_decide(double sup, const sc_quantile_table *table, double level,
                    int *reject, double *threshold);

/* --- Monte Carlo experiments --- */

/* config_path names a JSON file: {hypothesis, model, alpha?, N, L, lmin?,
 * grid?, replicates, spectrum?, temporal?, seed?, quantiles} where
 * quantiles is a table file path (relative paths resolve against the
 * config file's directory). Result JSON: {config, levels, thresholds,
 * frequencies, standard_errors, wall_time}. */
sc_status sc_experiment_run(const char *config_path, int n_threads, char **result_json);

/* Result JSON: {entries: [{lmin, sup, levels, thresholds, rejects} |
 * {lmin, error}]}. A failing entry does not stop the scan. */
sc_status sc_scan_run(const sc_panel *panel, const int *lmins, int n_lmins, int grid,
                      const sc_quantile_table *table, char **result_json);

/* --- gridded data ingestion --- */

/* CSV with header year,month,lat,lon,value -> anomalies vs [base_start,
 * base_end] -> annual means -> cubature regrid (order lstar) -> analysis to
 * lmax. info_json carries {"years": [...], "warnings": [...]}. */
sc_status sc_ingest_run(const char *input_path, int base_start, int base_end,
                        int lmax, int lstar, int fill_missing, sc_panel **out,
                        char **info_json);

#ifdef __cplusplus
}
#endif

#endif /* SPHCUSUM_H */
