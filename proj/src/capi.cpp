#include "sphcusum.h"

#include <cstring>
#include <filesystem>
#include <string>

#include "sphcusum/cusum.hpp"
#include "sphcusum/errors.hpp"
#include "sphcusum/fields.hpp"
#include "sphcusum/harness.hpp"
#include "sphcusum/ingest.hpp"
#include "sphcusum/io.hpp"
#include "sphcusum/pillowcase.hpp"
#include "sphcusum/version.hpp"

namespace {

thread_local std::string g_last_error;

struct PanelBox {
    sphcusum::CoefficientPanel panel;
};
struct TableBox {
    sphcusum::QuantileTable table;
};
struct SurfaceBox {
    sphcusum::StatisticSurface surface;
};

template <typename Fn> sc_status guarded(Fn &&fn) {
    try {
        fn();
        return SC_OK;
    } catch (const sphcusum::invalid_argument_error &e) {
        g_last_error = e.what();
        return SC_ERR_INVALID;
    } catch (const std::exception &e) {
        g_last_error = e.what();
        return SC_ERR_RUNTIME;
    }
}

char *dup_string(const std::string &s) {
    char *out = new char[s.size() + 1];
    std::memcpy(out, s.c_str(), s.size() + 1);
    return out;
}

sc_status require_args(bool ok, const char *msg) {
    if (ok) return SC_OK;
    g_last_error = msg;
    return SC_ERR_INVALID;
}

} // namespace

extern "C" {

struct sc_panel : PanelBox {};
struct sc_quantile_table : TableBox {};
struct sc_surface : SurfaceBox {};

const char *sc_version(void) { return sphcusum::kVersion; }

const char *sc_last_error(void) { return g_last_error.c_str(); }

void sc_string_free(char *s) { delete[] s; }

sc_status sc_panel_simulate(const char *hypothesis, int model, double alpha,
                            int n_times, int lmax, uint64_t seed,
                            const char *spectrum_rule, double c0, double eta,
                            const char *temporal_kind, double phi, sc_panel **out) {
    if (require_args(hypothesis && spectrum_rule && temporal_kind && out,
                     "sc_panel_simulate: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded([&] {
        using namespace sphcusum;
        const std::string hyp = hypothesis;
        bool time_varying;
        if (hyp == "h0") time_varying = false;
        else if (hyp == "h1") time_varying = true;
        else throw invalid_argument_error("hypothesis must be \"h0\" or \"h1\"");

        AngularPowerSpectrum spectrum;
        const std::string rule = spectrum_rule;
        if (rule == "llp1") spectrum = AngularPowerSpectrum::llp1(c0);
        else if (rule == "power_law") spectrum = AngularPowerSpectrum::power_law(eta, c0);
        else throw invalid_argument_error("spectrum_rule must be \"llp1\" or \"power_law\"");

        TemporalModel temporal;
        const std::string kind = temporal_kind;
        if (kind == "iid") temporal = TemporalModel::iid();
        else if (kind == "ar1") temporal = TemporalModel::ar1(phi);
        else throw invalid_argument_error("temporal_kind must be \"iid\" or \"ar1\"");

        const MeanScenario scenario = scenario_preset(model, time_varying, alpha, lmax);
        auto *box = new sc_panel;
        box->panel = simulate_panel(spectrum, temporal, scenario, n_times, lmax, seed);
        *out = box;
    });
}

sc_status sc_panel_read(const char *path, sc_panel **out) {
    if (require_args(path && out, "sc_panel_read: null argument") != SC_OK) return SC_ERR_INVALID;
    return guarded([&] {
        auto *box = new sc_panel;
        box->panel = sphcusum::read_panel_auto(path);
        *out = box;
    });
}

sc_status sc_panel_write_csv(const sc_panel *panel, const char *path) {
    if (require_args(panel && path, "sc_panel_write_csv: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded([&] { sphcusum::write_panel_csv(panel->panel, path); });
}

sc_status sc_panel_write_binary(const sc_panel *panel, const char *path) {
    if (require_args(panel && path, "sc_panel_write_binary: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded([&] { sphcusum::write_panel_binary(panel->panel, path); });
}

int sc_panel_lmax(const sc_panel *panel) { return panel ? panel->panel.lmax : -1; }

int sc_panel_n_times(const sc_panel *panel) { return panel ? panel->panel.n_times : -1; }

double sc_panel_value(const sc_panel *panel, int ell, int m, int t) {
    return panel->panel.at(ell, m, t);
}

void sc_panel_free(sc_panel *panel) { delete panel; }

sc_status sc_quantiles_estimate(int grid, long inner_n, int draws,
                                const double *levels, int n_levels, uint64_t seed,
                                int n_threads, sc_quantile_table **out) {
    if (require_args(levels && n_levels > 0 && out, "sc_quantiles_estimate: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded([&] {
        auto *box = new sc_quantile_table;
        box->table = sphcusum::estimate_quantiles(
            grid, inner_n, draws, std::vector<double>(levels, levels + n_levels), seed, n_threads);
        *out = box;
    });
}

sc_status sc_quantiles_read(const char *path, sc_quantile_table **out) {
    if (require_args(path && out, "sc_quantiles_read: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded([&] {
        auto *box = new sc_quantile_table;
        box->table = sphcusum::quantile_table_from_json(sphcusum::read_json_file(path));
        *out = box;
    });
}

sc_status sc_quantiles_to_json(const sc_quantile_table *table, char **out_json) {
    if (require_args(table && out_json, "sc_quantiles_to_json: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded(
        [&] { *out_json = dup_string(sphcusum::quantile_table_to_json(table->table).dump(2)); });
}

int sc_quantiles_n_levels(const sc_quantile_table *table) {
    return table ? static_cast<int>(table->table.levels.size()) : -1;
}

double sc_quantiles_level(const sc_quantile_table *table, int i) {
    return table->table.levels[static_cast<std::size_t>(i)];
}

double sc_quantiles_threshold(const sc_quantile_table *table, int i) {
    return table->table.thresholds[static_cast<std::size_t>(i)];
}

void sc_quantiles_free(sc_quantile_table *table) { delete table; }

sc_status sc_surface_compute(const sc_panel *panel, int lmin, int grid_r, int grid_s,
                             sc_surface **out) {
    if (require_args(panel && out, "sc_surface_compute: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded([&] {
        auto *box = new sc_surface;
        box->surface = sphcusum::statistic_surface(panel->panel, lmin, grid_r, grid_s);
        *out = box;
    });
}

double sc_surface_sup(const sc_surface *surface) {
    return sphcusum::sup_statistic(surface->surface);
}

sc_status sc_surface_write_csv(const sc_surface *surface, const char *path) {
    if (require_args(surface && path, "sc_surface_write_csv: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded([&] { sphcusum::write_surface_csv(surface->surface, path); });
}

sc_status sc_surface_meta_json(const sc_surface *surface, char **out_json) {
    if (require_args(surface && out_json, "sc_surface_meta_json: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded(
        [&] { *out_json = dup_string(sphcusum::surface_meta_json(surface->surface).dump(2)); });
}

void sc_surface_free(sc_surface *surface) { delete surface; }

sc_status sc_decide(double sup, const sc_quantile_table *table, double level, int *reject,
                    double *threshold) {
    if (require_args(table && reject && threshold, "sc_decide: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded([&] {
        const sphcusum::Decision d = sphcusum::decide(sup, table->table, level);
        *reject = d.reject ? 1 : 0;
        *threshold = d.threshold;
    });
}

sc_status sc_experiment_run(const char *config_path, int n_threads, char **result_json) {
    if (require_args(config_path && result_json, "sc_experiment_run: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded([&] {
        using namespace sphcusum;
        nlohmann::json j;
        try {
            j = read_json_file(config_path);
        } catch (const runtime_model_error &e) {
            // malformed or unreadable config is a usage problem
            throw invalid_argument_error(e.what());
        }
        ExperimentConfig config = experiment_config_from_json(j);
        config.n_threads = n_threads;
        if (!j.contains("quantiles"))
            throw invalid_argument_error("experiment config JSON: missing \"quantiles\" table path");
        std::filesystem::path table_path(j.at("quantiles").get<std::string>());
        if (table_path.is_relative())
            table_path = std::filesystem::path(config_path).parent_path() / table_path;
        const QuantileTable table = quantile_table_from_json(read_json_file(table_path.string()));
        const RejectionTable result = run_rejection_experiment(config, table);
        *result_json = dup_string(rejection_table_to_json(result, config).dump(2));
    });
}

sc_status sc_scan_run(const sc_panel *panel, const int *lmins, int n_lmins, int grid,
                      const sc_quantile_table *table, char **result_json) {
    if (require_args(panel && lmins && n_lmins > 0 && table && result_json,
                     "sc_scan_run: null or empty argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded([&] {
        const std::vector<int> list(lmins, lmins + n_lmins);
        const auto entries = sphcusum::multiscale_scan(panel->panel, list, grid, table->table);
        *result_json = dup_string(sphcusum::scan_entries_to_json(entries).dump(2));
    });
}

sc_status sc_ingest_run(const char *input_path, int base_start, int base_end, int lmax,
                        int lstar, int fill_missing, sc_panel **out, char **info_json) {
    if (require_args(input_path && out, "sc_ingest_run: null argument") != SC_OK)
        return SC_ERR_INVALID;
    return guarded([&] {
        sphcusum::PipelineResult result =
            sphcusum::pipeline(input_path, base_start, base_end, lmax, lstar, fill_missing != 0);
        auto *box = new sc_panel;
        box->panel = std::move(result.panel);
        *out = box;
        if (info_json) {
            nlohmann::json warnings = nlohmann::json::array();
            for (const std::string &w : result.warnings)
                warnings.push_back(nlohmann::json::parse(w));
            const nlohmann::json info = {{"years", result.years}, {"warnings", warnings}};
            *info_json = dup_string(info.dump(2));
        }
    });
}

} // extern "C"
