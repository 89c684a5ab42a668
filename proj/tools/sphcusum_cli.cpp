// Command-line front end: every subcommand writes its payload with an
// embedded run manifest (parameter echo, seed, version, wall time, output
// paths). Exit codes: 0 success, 1 runtime or model failure, 2 usage.

#include <chrono>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <iostream>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "sphcusum.h"

namespace {

using nlohmann::json;

constexpr int kExitOk = 0;
constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

int status_to_exit(sc_status s) {
    switch (s) {
    case SC_OK: return kExitOk;
    case SC_ERR_INVALID: return kExitUsage;
    default: return kExitRuntime;
    }
}

[[noreturn]] void fail(sc_status s) {
    std::cerr << "error: " << sc_last_error() << "\n";
    std::exit(status_to_exit(s));
}

[[noreturn]] void fail_usage(const std::string &msg) {
    std::cerr << "error: " << msg << "\n";
    std::exit(kExitUsage);
}

struct StringGuard {
    char *p = nullptr;
    ~StringGuard() { sc_string_free(p); }
};

struct Timer {
    std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    }
};

std::string utc_now() {
    const std::time_t t = std::time(nullptr);
    char buf[32];
    std::tm tm{};
    gmtime_r(&t, &tm);
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json make_manifest(const std::string &command, json parameters, std::uint64_t seed,
                   const std::vector<std::string> &outputs, double wall_time_s) {
    return {{"command", command},
            {"parameters", std::move(parameters)},
            {"seed", seed},
            {"version", sc_version()},
            {"wall_time_s", wall_time_s},
            {"outputs", outputs},
            {"timestamp", utc_now()}};
}

void write_json_or_die(const json &j, const std::string &path) {
    std::FILE *f = std::fopen(path.c_str(), "w");
    if (!f) {
        std::cerr << "error: cannot write " << path << "\n";
        std::exit(kExitRuntime);
    }
    const std::string text = j.dump(2) + "\n";
    const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    if (std::fclose(f) != 0 || !ok) {
        std::cerr << "error: write failed: " << path << "\n";
        std::exit(kExitRuntime);
    }
}

// threads flag shared by the compute-heavy commands; 0 = all cores
int g_threads = 0;

void add_threads_flag(CLI::App *cmd) {
    cmd->add_option("--threads", g_threads, "worker threads (0 = all cores)")
        ->capture_default_str();
}

struct PanelGuard {
    sc_panel *p = nullptr;
    ~PanelGuard() { sc_panel_free(p); }
};
struct TableGuard {
    sc_quantile_table *t = nullptr;
    ~TableGuard() { sc_quantiles_free(t); }
};
struct SurfaceGuard {
    sc_surface *s = nullptr;
    ~SurfaceGuard() { sc_surface_free(s); }
};

json table_decisions(const sc_quantile_table *table, double sup) {
    json levels = json::array(), thresholds = json::array(), rejects = json::array();
    for (int i = 0; i < sc_quantiles_n_levels(table); ++i) {
        const double level = sc_quantiles_level(table, i);
        int reject = 0;
        double threshold = 0.0;
        if (const sc_status s = sc_decide(sup, table, level, &reject, &threshold); s != SC_OK)
            fail(s);
        levels.push_back(level);
        thresholds.push_back(threshold);
        rejects.push_back(reject != 0);
    }
    return {{"levels", levels}, {"thresholds", thresholds}, {"rejects", rejects}};
}

void write_panel_with_sidecar(const sc_panel *panel, const std::string &out,
                              const std::string &format, std::uint64_t seed,
                              const json &scenario, const json &manifest) {
    sc_status s;
    if (format == "bin") s = sc_panel_write_binary(panel, out.c_str());
    else s = sc_panel_write_csv(panel, out.c_str());
    if (s != SC_OK) fail(s);
    const json sidecar = {{"lmax", sc_panel_lmax(panel)},
                          {"n_times", sc_panel_n_times(panel)},
                          {"seed", seed},
                          {"scenario", scenario},
                          {"manifest", manifest}};
    write_json_or_die(sidecar, out + ".meta.json");
}

int run_quantiles(int grid, long inner_n, int draws, std::vector<double> levels,
                  std::uint64_t seed, const std::string &out) {
    Timer timer;
    TableGuard table;
    if (const sc_status s = sc_quantiles_estimate(grid, inner_n, draws, levels.data(),
                                                  static_cast<int>(levels.size()), seed,
                                                  g_threads, &table.t);
        s != SC_OK)
        fail(s);
    StringGuard payload;
    if (const sc_status s = sc_quantiles_to_json(table.t, &payload.p); s != SC_OK) fail(s);
    json j = json::parse(payload.p);
    const json params = {{"grid", grid}, {"inner_n", inner_n}, {"draws", draws},
                         {"levels", levels}, {"seed", seed}, {"out", out}};
    j["manifest"] = make_manifest("quantiles", params, seed, {out}, timer.seconds());
    write_json_or_die(j, out);
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int run_simulate(const std::string &hypothesis, int model, double alpha, bool alpha_set,
                 int n_times, int lmax, std::uint64_t seed, const std::string &spectrum,
                 double c0, double eta, const std::string &temporal, double phi,
                 const std::string &format, const std::string &out) {
    if (hypothesis == "h1" && !alpha_set) fail_usage("--hypothesis h1 requires --alpha");
    Timer timer;
    PanelGuard panel;
    if (const sc_status s =
            sc_panel_simulate(hypothesis.c_str(), model, alpha, n_times, lmax, seed,
                              spectrum.c_str(), c0, eta, temporal.c_str(), phi, &panel.p);
        s != SC_OK)
        fail(s);
    const json scenario = {{"kind", "preset"},
                           {"hypothesis", hypothesis},
                           {"model", model},
                           {"alpha", hypothesis == "h1" ? json(alpha) : json(nullptr)},
                           {"spectrum", {{"rule", spectrum}, {"c0", c0}, {"eta", eta}}},
                           {"temporal", {{"kind", temporal}, {"phi", phi}}}};
    const json params = {{"hypothesis", hypothesis}, {"model", model}, {"alpha", alpha},
                         {"N", n_times},             {"L", lmax},      {"seed", seed},
                         {"spectrum", spectrum},     {"c0", c0},       {"eta", eta},
                         {"temporal", temporal},     {"phi", phi},     {"format", format},
                         {"out", out}};
    write_panel_with_sidecar(panel.p, out, format, seed, scenario,
                             make_manifest("simulate", params, seed, {out, out + ".meta.json"},
                                           timer.seconds()));
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int run_test(const std::string &panel_path, int lmin, int grid,
             const std::string &quantiles_path, const std::string &surface_out,
             const std::string &out) {
    Timer timer;
    PanelGuard panel;
    if (const sc_status s = sc_panel_read(panel_path.c_str(), &panel.p); s != SC_OK) fail(s);
    TableGuard table;
    if (const sc_status s = sc_quantiles_read(quantiles_path.c_str(), &table.t); s != SC_OK)
        fail(s);
    SurfaceGuard surface;
    if (const sc_status s = sc_surface_compute(panel.p, lmin, grid, grid, &surface.s); s != SC_OK)
        fail(s);
    const double sup = sc_surface_sup(surface.s);

    StringGuard meta;
    if (const sc_status s = sc_surface_meta_json(surface.s, &meta.p); s != SC_OK) fail(s);
    json j = {{"sup", sup}, {"surface", json::parse(meta.p)}};
    j.update(table_decisions(table.t, sup));

    std::vector<std::string> outputs = {out};
    if (!surface_out.empty()) {
        if (const sc_status s = sc_surface_write_csv(surface.s, surface_out.c_str()); s != SC_OK)
            fail(s);
        j["surface_csv"] = surface_out;
        outputs.push_back(surface_out);
    }
    const json params = {{"panel", panel_path}, {"lmin", lmin},
                         {"grid", grid},        {"quantiles", quantiles_path},
                         {"out", out},          {"surface_out", surface_out}};
    j["manifest"] = make_manifest("test", params, 0, outputs, timer.seconds());
    write_json_or_die(j, out);
    std::cout << "sup = " << sup << "\n";
    return kExitOk;
}

int run_experiment(const std::string &config_path, const std::string &out) {
    Timer timer;
    StringGuard payload;
    if (const sc_status s = sc_experiment_run(config_path.c_str(), g_threads, &payload.p);
        s != SC_OK)
        fail(s);
    json j = json::parse(payload.p);
    const json params = {{"config", config_path}, {"out", out}};
    const std::uint64_t seed = j["config"].value("seed", static_cast<std::uint64_t>(0));
    j["manifest"] = make_manifest("experiment", params, seed, {out}, timer.seconds());
    write_json_or_die(j, out);
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

int run_ingest(const std::string &input, int base_start, int base_end, int lmax, int lstar,
               bool fill_missing, const std::string &format, const std::string &out) {
    Timer timer;
    PanelGuard panel;
    StringGuard info;
    if (const sc_status s = sc_ingest_run(input.c_str(), base_start, base_end, lmax, lstar,
                                          fill_missing ? 1 : 0, &panel.p, &info.p);
        s != SC_OK)
        fail(s);
    const json info_json = json::parse(info.p);
    for (const json &w : info_json["warnings"])
        std::cerr << w.dump() << "\n"; // warning records as JSON lines
    const json scenario = {{"kind", "ingest"},
                           {"input", input},
                           {"base", {base_start, base_end}},
                           {"years", info_json["years"]},
                           {"warnings", info_json["warnings"]}};
    const json params = {{"input", input},   {"base_start", base_start},
                         {"base_end", base_end}, {"lmax", lmax},
                         {"lstar", lstar},   {"fill_missing", fill_missing},
                         {"format", format}, {"out", out}};
    write_panel_with_sidecar(panel.p, out, format, 0, scenario,
                             make_manifest("ingest", params, 0, {out, out + ".meta.json"},
                                           timer.seconds()));
    std::cout << "wrote " << out << " (" << sc_panel_n_times(panel.p) << " years)\n";
    return kExitOk;
}

int run_scan(const std::string &panel_path, std::vector<int> lmins, int grid,
             const std::string &quantiles_path, const std::string &out) {
    Timer timer;
    PanelGuard panel;
    if (const sc_status s = sc_panel_read(panel_path.c_str(), &panel.p); s != SC_OK) fail(s);
    TableGuard table;
    if (const sc_status s = sc_quantiles_read(quantiles_path.c_str(), &table.t); s != SC_OK)
        fail(s);
    StringGuard payload;
    if (const sc_status s = sc_scan_run(panel.p, lmins.data(), static_cast<int>(lmins.size()),
                                        grid, table.t, &payload.p);
        s != SC_OK)
        fail(s);
    json j = json::parse(payload.p);
    const json params = {{"panel", panel_path}, {"lmin_list", lmins},
                         {"grid", grid},        {"quantiles", quantiles_path},
                         {"out", out}};
    j["manifest"] = make_manifest("scan", params, 0, {out}, timer.seconds());
    write_json_or_die(j, out);
    std::cout << "wrote " << out << "\n";
    return kExitOk;
}

} // namespace

int main(int argc, char **argv) {
    CLI::App app{"multiscale CUSUM change-point testing for spherical random fields"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(sc_version()));

    // quantiles
    auto *q = app.add_subcommand("quantiles", "estimate sup-norm quantiles of the limit process");
    int q_grid = 300, q_draws = 2000;
    long q_inner = 10000;
    std::vector<double> q_levels = {0.9, 0.95, 0.99};
    std::uint64_t q_seed = 0;
    std::string q_out;
    q->add_option("--grid", q_grid, "evaluation grid size")->capture_default_str();
    q->add_option("--inner-n", q_inner, "paths per draw")->capture_default_str();
    q->add_option("--draws", q_draws, "Monte Carlo draws")->capture_default_str();
    q->add_option("--levels", q_levels, "quantile levels in (0,1)")
        ->delimiter(',')
        ->capture_default_str();
    q->add_option("--seed", q_seed, "RNG seed")->capture_default_str();
    q->add_option("--out", q_out, "output JSON path")->required();
    add_threads_flag(q);

    // simulate
    auto *sim = app.add_subcommand("simulate", "simulate a coefficient panel");
    std::string s_hyp, s_spectrum = "llp1", s_temporal = "iid", s_format = "csv", s_out;
    int s_model = 0, s_n = 0, s_lmax = 0;
    double s_alpha = 0.0, s_c0 = 1.0, s_eta = 3.0, s_phi = 0.0;
    std::uint64_t s_seed = 0;
    sim->add_option("--hypothesis", s_hyp, "h0 or h1")->required()
        ->check(CLI::IsMember({"h0", "h1"}));
    sim->add_option("--model", s_model, "mean model 1, 2, or 3")->required();
    auto *alpha_opt = sim->add_option("--alpha", s_alpha, "trend exponent (h1)");
    sim->add_option("--N", s_n, "number of time points")->required();
    sim->add_option("--L", s_lmax, "max multipole")->required();
    sim->add_option("--seed", s_seed, "RNG seed")->capture_default_str();
    sim->add_option("--spectrum", s_spectrum, "llp1 or power_law")
        ->check(CLI::IsMember({"llp1", "power_law"}))
        ->capture_default_str();
    sim->add_option("--c0", s_c0, "variance at ell=0")->capture_default_str();
    sim->add_option("--eta", s_eta, "power-law exponent")->capture_default_str();
    sim->add_option("--temporal", s_temporal, "iid or ar1")
        ->check(CLI::IsMember({"iid", "ar1"}))
        ->capture_default_str();
    sim->add_option("--phi", s_phi, "AR(1) coefficient")->capture_default_str();
    sim->add_option("--format", s_format, "csv or bin")
        ->check(CLI::IsMember({"csv", "bin"}))
        ->capture_default_str();
    sim->add_option("--out", s_out, "output panel path")->required();

    // test
    auto *tst = app.add_subcommand("test", "CUSUM test of one panel");
    std::string t_panel, t_quantiles, t_surface_out, t_out;
    int t_lmin = 0, t_grid = 300;
    tst->add_option("--panel", t_panel, "panel file (csv or binary)")->required();
    tst->add_option("--lmin", t_lmin, "lowest multipole in the sum")->capture_default_str();
    tst->add_option("--grid", t_grid, "surface evaluation grid")->capture_default_str();
    tst->add_option("--quantiles", t_quantiles, "quantile table JSON")->required();
    tst->add_option("--surface-out", t_surface_out, "also write the surface CSV here");
    tst->add_option("--out", t_out, "output JSON path")->required();

    // experiment
    auto *exp = app.add_subcommand("experiment", "Monte Carlo rejection-frequency experiment");
    std::string e_config, e_out;
    exp->add_option("--config", e_config, "experiment config JSON")->required();
    exp->add_option("--out", e_out, "output JSON path")->required();
    add_threads_flag(exp);

    // ingest
    auto *ing = app.add_subcommand("ingest", "lat-lon CSV to coefficient panel");
    std::string i_input, i_format = "csv", i_out;
    int i_bs = 0, i_be = 0, i_lmax = 32, i_lstar = 64;
    bool i_fill = false;
    ing->add_option("--input", i_input, "input CSV (year,month,lat,lon,value)")->required();
    ing->add_option("--base-start", i_bs, "first base-period year")->required();
    ing->add_option("--base-end", i_be, "last base-period year")->required();
    ing->add_option("--lmax", i_lmax, "analysis band limit")->capture_default_str();
    ing->add_option("--lstar", i_lstar, "cubature grid order")->capture_default_str();
    ing->add_flag("--fill-missing", i_fill, "nearest-neighbor fill for missing cells");
    ing->add_option("--format", i_format, "csv or bin")
        ->check(CLI::IsMember({"csv", "bin"}))
        ->capture_default_str();
    ing->add_option("--out", i_out, "output panel path")->required();

    // scan
    auto *scn = app.add_subcommand("scan", "sup and decisions over a list of lmin values");
    std::string c_panel, c_quantiles, c_out;
    std::vector<int> c_lmins;
    int c_grid = 300;
    scn->add_option("--panel", c_panel, "panel file (csv or binary)")->required();
    scn->add_option("--lmin-list", c_lmins, "comma-separated lmin values")
        ->delimiter(',')
        ->required();
    scn->add_option("--grid", c_grid, "surface evaluation grid")->capture_default_str();
    scn->add_option("--quantiles", c_quantiles, "quantile table JSON")->required();
    scn->add_option("--out", c_out, "output JSON path")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp &e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion &e) {
        return app.exit(e);
    } catch (const CLI::ParseError &e) {
        app.exit(e);
        return kExitUsage;
    }

    if (q->parsed())
        return run_quantiles(q_grid, q_inner, q_draws, q_levels, q_seed, q_out);
    if (sim->parsed())
        return run_simulate(s_hyp, s_model, s_alpha, alpha_opt->count() > 0, s_n, s_lmax, s_seed,
                            s_spectrum, s_c0, s_eta, s_temporal, s_phi, s_format, s_out);
    if (tst->parsed())
        return run_test(t_panel, t_lmin, t_grid, t_quantiles, t_surface_out, t_out);
    if (exp->parsed()) return run_experiment(e_config, e_out);
    if (ing->parsed())
        return run_ingest(i_input, i_bs, i_be, i_lmax, i_lstar, i_fill, i_format, i_out);
    if (scn->parsed()) return run_scan(c_panel, c_lmins, c_grid, c_quantiles, c_out);
    return kExitUsage;
}
