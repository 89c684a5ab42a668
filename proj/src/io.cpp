#include "sphcusum/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>

#include "sphcusum/errors.hpp"

namespace sphcusum {

namespace {

constexpr std::array<char, 8> kPanelMagic = {'S', 'P', 'H', 'C', 'P', 'N', 'L', '1'};

static_assert(std::endian::native == std::endian::little,
              "binary panel I/O assumes a little-endian host");

void require(bool ok, const std::string &msg) {
    if (!ok) throw runtime_model_error(msg);
}

} // namespace

void write_panel_csv(const CoefficientPanel &panel, const std::string &path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write " + path);
    out << "ell,m,t,value\n";
    char buf[96];
    for (int ell = 0; ell <= panel.lmax; ++ell) {
        for (int m = -ell; m <= ell; ++m) {
            for (int t = 1; t <= panel.n_times; ++t) {
                std::snprintf(buf, sizeof buf, "%d,%d,%d,%.17g\n", ell, m, t, panel.at(ell, m, t));
                out << buf;
            }
        }
    }
    require(static_cast<bool>(out), "write failed: " + path);
}

CoefficientPanel read_panel_csv(const std::string &path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open " + path);
    std::string line;
    require(static_cast<bool>(std::getline(in, line)), path + ": empty file");
    {
        std::string h = line;
        h.erase(std::remove_if(h.begin(), h.end(), [](char c) { return c == ' ' || c == '\r'; }),
                h.end());
        require(h == "ell,m,t,value", path + ": expected header ell,m,t,value");
    }
    struct Row {
        int ell, m, t;
        double value;
    };
    std::vector<Row> rows;
    int lmax = -1, n_times = 0;
    long line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        Row r;
        if (std::sscanf(line.c_str(), "%d,%d,%d,%lf", &r.ell, &r.m, &r.t, &r.value) != 4)
            throw runtime_model_error(path + ":" + std::to_string(line_no) + ": malformed row");
        require(r.ell >= 0 && std::abs(r.m) <= r.ell && r.t >= 1,
                path + ":" + std::to_string(line_no) + ": indices out of range");
        lmax = std::max(lmax, r.ell);
        n_times = std::max(n_times, r.t);
        rows.push_back(r);
    }
    require(lmax >= 0, path + ": no data rows");
    CoefficientPanel panel(lmax, n_times);
    std::vector<char> seen(panel.values.size(), 0);
    for (const Row &r : rows) {
        const std::size_t idx =
            static_cast<std::size_t>(CoefficientPanel::index(r.ell, r.m)) * n_times + (r.t - 1);
        require(!seen[idx], path + ": duplicate entry for ell=" + std::to_string(r.ell) +
                                " m=" + std::to_string(r.m) + " t=" + std::to_string(r.t));
        seen[idx] = 1;
        panel.values[idx] = r.value;
    }
    for (std::size_t i = 0; i < seen.size(); ++i)
        require(seen[i] != 0, path + ": incomplete panel (missing coefficient rows)");
    return panel;
}

void write_panel_binary(const CoefficientPanel &panel, const std::string &path) {
    std::ofstream out(path, std::ios::binary);
    require(static_cast<bool>(out), "cannot write " + path);
    out.write(kPanelMagic.data(), kPanelMagic.size());
    const std::uint32_t lmax = static_cast<std::uint32_t>(panel.lmax);
    const std::uint32_t n_times = static_cast<std::uint32_t>(panel.n_times);
    out.write(reinterpret_cast<const char *>(&lmax), 4);
    out.write(reinterpret_cast<const char *>(&n_times), 4);
    out.write(reinterpret_cast<const char *>(panel.values.data()),
              static_cast<std::streamsize>(panel.values.size() * sizeof(double)));
    require(static_cast<bool>(out), "write failed: " + path);
}

CoefficientPanel read_panel_binary(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open " + path);
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    require(in.gcount() == 8 && magic == kPanelMagic, path + ": not a binary panel file");
    std::uint32_t lmax = 0, n_times = 0;
    in.read(reinterpret_cast<char *>(&lmax), 4);
    in.read(reinterpret_cast<char *>(&n_times), 4);
    require(static_cast<bool>(in), path + ": truncated header");
    require(lmax <= 100000 && n_times >= 1 && n_times <= 100000000,
            path + ": implausible dimensions");
    CoefficientPanel panel(static_cast<int>(lmax), static_cast<int>(n_times));
    in.read(reinterpret_cast<char *>(panel.values.data()),
            static_cast<std::streamsize>(panel.values.size() * sizeof(double)));
    require(in.gcount() == static_cast<std::streamsize>(panel.values.size() * sizeof(double)),
            path + ": truncated payload");
    return panel;
}

CoefficientPanel read_panel_auto(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    require(static_cast<bool>(in), "cannot open " + path);
    std::array<char, 8> magic{};
    in.read(magic.data(), magic.size());
    in.close();
    if (in.gcount() == 8 && magic == kPanelMagic) return read_panel_binary(path);
    return read_panel_csv(path);
}

nlohmann::json quantile_table_to_json(const QuantileTable &table) {
    return {{"levels", table.levels},
            {"thresholds", table.thresholds},
            {"grid", table.grid},
            {"inner_n", table.inner_n},
            {"draws", table.draws},
            {"seed", table.seed}};
}

QuantileTable quantile_table_from_json(const nlohmann::json &j) {
    QuantileTable t;
    try {
        t.levels = j.at("levels").get<std::vector<double>>();
        t.thresholds = j.at("thresholds").get<std::vector<double>>();
        t.grid = j.at("grid").get<int>();
        t.inner_n = j.at("inner_n").get<long>();
        t.draws = j.at("draws").get<int>();
        t.seed = j.at("seed").get<std::uint64_t>();
    } catch (const nlohmann::json::exception &e) {
        throw runtime_model_error(std::string("quantile table JSON: ") + e.what());
    }
    require(t.levels.size() == t.thresholds.size() && !t.levels.empty(),
            "quantile table JSON: levels/thresholds mismatch");
    return t;
}

nlohmann::json read_json_file(const std::string &path) {
    std::ifstream in(path);
    require(static_cast<bool>(in), "cannot open " + path);
    try {
        return nlohmann::json::parse(in);
    } catch (const nlohmann::json::parse_error &e) {
        throw runtime_model_error(path + ": " + e.what());
    }
}

void write_json_file(const nlohmann::json &j, const std::string &path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write " + path);
    out << j.dump(2) << "\n";
    require(static_cast<bool>(out), "write failed: " + path);
}

void write_surface_csv(const StatisticSurface &surface, const std::string &path) {
    std::ofstream out(path);
    require(static_cast<bool>(out), "cannot write " + path);
    char buf[32];
    for (int j = 0; j <= surface.grid_r; ++j) {
        for (int k = 0; k <= surface.grid_s; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", surface.at(j, k));
            out << buf << (k == surface.grid_s ? '\n' : ',');
        }
    }
    require(static_cast<bool>(out), "write failed: " + path);
}

nlohmann::json surface_meta_json(const StatisticSurface &surface) {
    return {{"N", surface.N},         {"L", surface.L},
            {"lmin", surface.lmin},   {"grid_r", surface.grid_r},
            {"grid_s", surface.grid_s}, {"sup", sup_statistic(surface)}};
}

nlohmann::json experiment_config_to_json(const ExperimentConfig &config) {
    nlohmann::json spectrum;
    switch (config.spectrum.rule) {
    case AngularPowerSpectrum::Rule::llp1:
        spectrum = {{"rule", "llp1"}, {"c0", config.spectrum.c0}};
        break;
    case AngularPowerSpectrum::Rule::power_law:
        spectrum = {{"rule", "power_law"}, {"c0", config.spectrum.c0}, {"eta", config.spectrum.eta}};
        break;
    case AngularPowerSpectrum::Rule::custom:
        spectrum = {{"rule", "custom"}};
        break;
    }
    return {{"hypothesis", config.hypothesis == ExperimentConfig::Hypothesis::h0 ? "h0" : "h1"},
            {"model", config.model_id},
            {"alpha", config.alpha},
            {"N", config.n_times},
            {"L", config.lmax},
            {"lmin", config.lmin},
            {"grid", config.grid},
            {"replicates", config.replicates},
            {"spectrum", spectrum},
            {"temporal",
             {{"kind", config.temporal.kind == TemporalModel::Kind::iid ? "iid" : "ar1"},
              {"phi", config.temporal.phi}}},
            {"seed", config.seed}};
}

ExperimentConfig experiment_config_from_json(const nlohmann::json &j) {
    ExperimentConfig c;
    try {
        const std::string hyp = j.at("hypothesis").get<std::string>();
        if (hyp == "h0") c.hypothesis = ExperimentConfig::Hypothesis::h0;
        else if (hyp == "h1") c.hypothesis = ExperimentConfig::Hypothesis::h1;
        else throw invalid_argument_error("config: hypothesis must be \"h0\" or \"h1\"");
        c.model_id = j.at("model").get<int>();
        c.n_times = j.at("N").get<int>();
        c.lmax = j.at("L").get<int>();
        c.replicates = j.at("replicates").get<int>();
        c.alpha = j.value("alpha", 0.0);
        c.lmin = j.value("lmin", 0);
        c.grid = j.value("grid", 300);
        c.seed = j.value("seed", static_cast<std::uint64_t>(0));
        if (j.contains("spectrum")) {
            const auto &s = j.at("spectrum");
            const std::string rule = s.value("rule", "llp1");
            const double c0 = s.value("c0", 1.0);
            if (rule == "llp1") c.spectrum = AngularPowerSpectrum::llp1(c0);
            else if (rule == "power_law")
                c.spectrum = AngularPowerSpectrum::power_law(s.at("eta").get<double>(), c0);
            else throw invalid_argument_error("config: unknown spectrum rule " + rule);
        }
        if (j.contains("temporal")) {
            const auto &t = j.at("temporal");
            const std::string kind = t.value("kind", "iid");
            if (kind == "iid") c.temporal = TemporalModel::iid();
            else if (kind == "ar1") c.temporal = TemporalModel::ar1(t.at("phi").get<double>());
            else throw invalid_argument_error("config: unknown temporal kind " + kind);
        }
        if (c.hypothesis == ExperimentConfig::Hypothesis::h1 && !j.contains("alpha"))
            throw invalid_argument_error("config: h1 requires alpha");
    } catch (const nlohmann::json::exception &e) {
        throw invalid_argument_error(std::string("experiment config JSON: ") + e.what());
    }
    return c;
}

nlohmann::json rejection_table_to_json(const RejectionTable &result,
                                       const ExperimentConfig &config) {
    return {{"config", experiment_config_to_json(config)},
            {"levels", result.levels},
            {"thresholds", result.thresholds},
            {"frequencies", result.frequencies},
            {"standard_errors", result.standard_errors},
            {"wall_time", result.wall_time_s}};
}

nlohmann::json scan_entries_to_json(const std::vector<ScanEntry> &entries) {
    nlohmann::json arr = nlohmann::json::array();
    for (const ScanEntry &e : entries) {
        nlohmann::json item = {{"lmin", e.lmin}};
        if (!e.error.empty()) {
            item["error"] = e.error;
        } else {
            item["sup"] = e.sup;
            item["levels"] = e.levels;
            item["thresholds"] = e.thresholds;
            nlohmann::json rejects = nlohmann::json::array();
            for (const bool r : e.rejects) rejects.push_back(r);
            item["rejects"] = rejects;
        }
        arr.push_back(item);
    }
    return {{"entries", arr}};
}

} // namespace sphcusum
