#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <unistd.h>

#include <doctest.h>
#include <json.hpp>

#include "sphcusum/errors.hpp"
#include "sphcusum/fields.hpp"
#include "sphcusum/harness.hpp"
#include "sphcusum/io.hpp"

using namespace sphcusum;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() /
               ("sphcusum_io_" + std::to_string(::getpid()) + "_" +
                std::to_string(reinterpret_cast<std::uintptr_t>(this)));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
    std::string file(const std::string &name) const { return (path / name).string(); }
};

CoefficientPanel sample_panel() {
    const auto spec = AngularPowerSpectrum::llp1(1.0);
    return simulate_panel(spec, TemporalModel::iid(), MeanScenario{}, 7, 3, 2024);
}

} // namespace

TEST_SUITE("io") {

TEST_CASE("panel csv round trip is exact") {
    const TempDir dir;
    const CoefficientPanel panel = sample_panel();
    const std::string path = dir.file("panel.csv");
    write_panel_csv(panel, path);
    const CoefficientPanel back = read_panel_csv(path);
    CHECK(back.lmax == panel.lmax);
    CHECK(back.n_times == panel.n_times);
    CHECK(back.values == panel.values); // %.17g preserves doubles bit for bit
    const CoefficientPanel sniffed = read_panel_auto(path);
    CHECK(sniffed.values == panel.values);
}

TEST_CASE("panel binary round trip is exact") {
    const TempDir dir;
    const CoefficientPanel panel = sample_panel();
    const std::string path = dir.file("panel.bin");
    write_panel_binary(panel, path);
    const CoefficientPanel back = read_panel_binary(path);
    CHECK(back.lmax == panel.lmax);
    CHECK(back.n_times == panel.n_times);
    CHECK(back.values == panel.values);
    CHECK(read_panel_auto(path).values == panel.values);
}

TEST_CASE("panel csv rejects malformed input") {
    const TempDir dir;
    const std::string path = dir.file("bad.csv");

    std::ofstream(path) << "wrong,header\n";
    CHECK_THROWS_WITH_AS((void)read_panel_csv(path), doctest::Contains("header"),
                         runtime_model_error);

    std::ofstream(path) << "ell,m,t,value\n0,0,1,1.5\n0,0,1,2.5\n";
    CHECK_THROWS_WITH_AS((void)read_panel_csv(path), doctest::Contains("duplicate"),
                         runtime_model_error);

    std::ofstream(path) << "ell,m,t,value\n1,0,1,1.5\n";
    CHECK_THROWS_WITH_AS((void)read_panel_csv(path), doctest::Contains("incomplete"),
                         runtime_model_error);

    std::ofstream(path) << "ell,m,t,value\n0,0,one,1.5\n";
    CHECK_THROWS_WITH_AS((void)read_panel_csv(path), doctest::Contains("malformed"),
                         runtime_model_error);

    std::ofstream(path) << "ell,m,t,value\n1,2,1,1.5\n";
    CHECK_THROWS_AS((void)read_panel_csv(path), runtime_model_error);

    CHECK_THROWS_AS((void)read_panel_csv(dir.file("absent.csv")), runtime_model_error);
}

TEST_CASE("binary reader guards the header") {
    const TempDir dir;
    const std::string path = dir.file("trunc.bin");
    std::ofstream(path, std::ios::binary) << "SPHCPNL1";
    CHECK_THROWS_WITH_AS((void)read_panel_binary(path), doctest::Contains("truncated"),
                         runtime_model_error);
    std::ofstream(path, std::ios::binary) << "NOTMAGIC" << std::string(16, '\0');
    CHECK_THROWS_AS((void)read_panel_binary(path), runtime_model_error);
}

TEST_CASE("quantile table json round trip") {
    QuantileTable t;
    t.levels = {0.9, 0.95};
    t.thresholds = {1.25, 1.5};
    t.grid = 100;
    t.inner_n = 1000;
    t.draws = 500;
    t.seed = 123456789012345ull;
    const nlohmann::json j = quantile_table_to_json(t);
    const QuantileTable back = quantile_table_from_json(j);
    CHECK(back.levels == t.levels);
    CHECK(back.thresholds == t.thresholds);
    CHECK(back.grid == t.grid);
    CHECK(back.inner_n == t.inner_n);
    CHECK(back.draws == t.draws);
    CHECK(back.seed == t.seed);

    nlohmann::json broken = j;
    broken.erase("thresholds");
    CHECK_THROWS_AS((void)quantile_table_from_json(broken), runtime_model_error);
    broken = j;
    broken["thresholds"] = {1.25};
    CHECK_THROWS_AS((void)quantile_table_from_json(broken), runtime_model_error);
}

TEST_CASE("experiment config json round trip") {
    ExperimentConfig c;
    c.hypothesis = ExperimentConfig::Hypothesis::h1;
    c.model_id = 2;
    c.alpha = 0.5;
    c.n_times = 50;
    c.lmax = 12;
    c.lmin = 1;
    c.grid = 80;
    c.replicates = 33;
    c.spectrum = AngularPowerSpectrum::power_law(3.0, 2.0);
    c.temporal = TemporalModel::ar1(0.4);
    c.seed = 999;
    const ExperimentConfig back = experiment_config_from_json(experiment_config_to_json(c));
    CHECK(back.hypothesis == c.hypothesis);
    CHECK(back.model_id == 2);
    CHECK(back.alpha == 0.5);
    CHECK(back.n_times == 50);
    CHECK(back.lmax == 12);
    CHECK(back.lmin == 1);
    CHECK(back.grid == 80);
    CHECK(back.replicates == 33);
    CHECK(back.spectrum.rule == AngularPowerSpectrum::Rule::power_law);
    CHECK(back.spectrum.eta == 3.0);
    CHECK(back.spectrum.c0 == 2.0);
    CHECK(back.temporal.kind == TemporalModel::Kind::ar1);
    CHECK(back.temporal.phi == 0.4);
    CHECK(back.seed == 999);
}

TEST_CASE("experiment config errors are usage errors") {
    nlohmann::json j = {{"hypothesis", "h2"}, {"model", 1}, {"N", 10},
                        {"L", 3},             {"replicates", 5}};
    CHECK_THROWS_AS((void)experiment_config_from_json(j), invalid_argument_error);
    j["hypothesis"] = "h1"; // h1 without alpha
    CHECK_THROWS_AS((void)experiment_config_from_json(j), invalid_argument_error);
    j["hypothesis"] = "h0";
    j.erase("model");
    CHECK_THROWS_AS((void)experiment_config_from_json(j), invalid_argument_error);
}

TEST_CASE("surface csv and metadata") {
    const TempDir dir;
    StatisticSurface s;
    s.grid_r = 1;
    s.grid_s = 2;
    s.N = 4;
    s.L = 1;
    s.lmin = 0;
    s.values = {0.0, 0.5, 0.0, 0.0, -1.25, 0.0};
    const std::string path = dir.file("surface.csv");
    write_surface_csv(s, path);
    std::ifstream in(path);
    std::string l1, l2;
    std::getline(in, l1);
    std::getline(in, l2);
    CHECK(l1 == "0,0.5,0");
    CHECK(l2 == "0,-1.25,0");

    const nlohmann::json meta = surface_meta_json(s);
    CHECK(meta.at("N") == 4);
    CHECK(meta.at("L") == 1);
    CHECK(meta.at("lmin") == 0);
    CHECK(meta.at("grid_r") == 1);
    CHECK(meta.at("grid_s") == 2);
    CHECK(meta.at("sup") == 1.25);
}

TEST_CASE("scan entries serialize decisions and failures") {
    ScanEntry good;
    good.lmin = 0;
    good.sup = 1.9;
    good.levels = {0.9};
    good.thresholds = {1.5};
    good.rejects = {true};
    ScanEntry bad;
    bad.lmin = 9;
    bad.error = "out of range";
    const nlohmann::json j = scan_entries_to_json({good, bad});
    REQUIRE(j.at("entries").size() == 2);
    CHECK(j["entries"][0]["sup"] == 1.9);
    CHECK(j["entries"][0]["rejects"][0] == true);
    CHECK(!j["entries"][0].contains("error"));
    CHECK(j["entries"][1]["error"] == "out of range");
    CHECK(!j["entries"][1].contains("sup"));
}

} // TEST_SUITE
