#include <cmath>
#include <vector>

#include <doctest.h>

#include "sphcusum/cusum.hpp"
#include "sphcusum/errors.hpp"
#include "sphcusum/harness.hpp"
#include "sphcusum/pillowcase.hpp"
#include "sphcusum/rng.hpp"

using namespace sphcusum;

namespace {

QuantileTable toy_table() {
    QuantileTable t;
    t.levels = {0.9, 0.95, 0.99};
    t.thresholds = {1.2911, 1.4142, 1.7104};
    return t;
}

ExperimentConfig small_h0() {
    ExperimentConfig c;
    c.hypothesis = ExperimentConfig::Hypothesis::h0;
    c.model_id = 1;
    c.n_times = 40;
    c.lmax = 6;
    c.lmin = 0;
    c.grid = 24;
    c.replicates = 60;
    c.seed = 1234;
    c.n_threads = 1;
    return c;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("single replicate gives a degenerate frequency") {
    ExperimentConfig c = small_h0();
    c.replicates = 1;
    const RejectionTable r = run_rejection_experiment(c, toy_table());
    REQUIRE(r.sups.size() == 1);
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
        CHECK((r.frequencies[i] == 0.0 || r.frequencies[i] == 1.0));
        CHECK(r.standard_errors[i] == 0.0);
    }
}

TEST_CASE("frequencies are monotone in the level and match the sups") {
    const ExperimentConfig c = small_h0();
    const RejectionTable r = run_rejection_experiment(c, toy_table());
    REQUIRE(r.sups.size() == 60);
    for (std::size_t i = 1; i < r.levels.size(); ++i)
        CHECK(r.frequencies[i] <= r.frequencies[i - 1]);
    // frequencies recomputed from the recorded sups
    for (std::size_t i = 0; i < r.levels.size(); ++i) {
        long n = 0;
        for (const double s : r.sups)
            if (s > r.thresholds[i]) ++n;
        CHECK(r.frequencies[i] == doctest::Approx(n / 60.0).epsilon(1e-15));
        CHECK(r.standard_errors[i] ==
              doctest::Approx(std::sqrt(r.frequencies[i] * (1 - r.frequencies[i]) / 60.0))
                  .epsilon(1e-12));
    }
}

TEST_CASE("replicates are reproducible and independent of the thread count") {
    ExperimentConfig c = small_h0();
    const RejectionTable a = run_rejection_experiment(c, toy_table());
    c.n_threads = 3;
    const RejectionTable b = run_rejection_experiment(c, toy_table());
    CHECK(a.sups == b.sups);
    CHECK(a.frequencies == b.frequencies);
}

TEST_CASE("replicate sups match a manual rerun of the pipeline") {
    const ExperimentConfig c = small_h0();
    const RejectionTable r = run_rejection_experiment(c, toy_table());
    const MeanScenario scenario = scenario_preset(1, false, 0.0, c.lmax);
    for (int i = 0; i < 5; ++i) {
        const std::uint64_t child = derive_seed(c.seed, static_cast<std::uint64_t>(i), 0x7265706cu);
        const CoefficientPanel panel =
            simulate_panel(c.spectrum, c.temporal, scenario, c.n_times, c.lmax, child);
        const double sup = sup_statistic(statistic_surface(panel, 0, c.grid, c.grid));
        CHECK(r.sups[i] == sup);
    }
}

TEST_CASE("null rejection stays in a loose band around the nominal level") {
    ExperimentConfig c = small_h0();
    c.n_times = 100;
    c.lmax = 10;
    c.replicates = 150;
    const RejectionTable r = run_rejection_experiment(c, toy_table());
    // finite-sample distortion is expected; guard only against gross errors
    CHECK(r.frequencies[0] <= 0.25);
    CHECK(r.frequencies[2] <= 0.10);
}

TEST_CASE("a strong trend rejects always") {
    ExperimentConfig c = small_h0();
    c.hypothesis = ExperimentConfig::Hypothesis::h1;
    c.model_id = 2;
    c.alpha = 1.0;
    c.n_times = 60;
    c.replicates = 30;
    const RejectionTable r = run_rejection_experiment(c, toy_table());
    for (const double f : r.frequencies) CHECK(f == 1.0);
}

TEST_CASE("config validation") {
    ExperimentConfig c = small_h0();
    c.replicates = 0;
    CHECK_THROWS_AS((void)run_rejection_experiment(c, toy_table()), invalid_argument_error);
    c = small_h0();
    c.lmin = 7;
    CHECK_THROWS_AS((void)run_rejection_experiment(c, toy_table()), invalid_argument_error);
    c = small_h0();
    CHECK_THROWS_AS((void)run_rejection_experiment(c, QuantileTable{}), invalid_argument_error);
}

TEST_CASE("replicate failures carry the replicate index") {
    ExperimentConfig c = small_h0();
    c.spectrum = AngularPowerSpectrum::custom([](int) { return 0.0; }, 0.0);
    CHECK_THROWS_WITH_AS((void)run_rejection_experiment(c, toy_table()),
                         doctest::Contains("replicate"), runtime_model_error);
}

TEST_CASE("scan at the full range equals the direct statistic") {
    const auto spec = AngularPowerSpectrum::llp1(1.0);
    const CoefficientPanel panel =
        simulate_panel(spec, TemporalModel::iid(), MeanScenario{}, 30, 8, 99);
    const auto entries = multiscale_scan(panel, {0, 1, 2}, 24, toy_table());
    REQUIRE(entries.size() == 3);
    for (const auto &e : entries) CHECK(e.error.empty());
    CHECK(entries[0].sup == sup_statistic(statistic_surface(panel, 0, 24, 24)));
    CHECK(entries[1].sup == sup_statistic(statistic_surface(panel, 1, 24, 24)));
    for (const auto &e : entries) {
        REQUIRE(e.rejects.size() == 3);
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(e.rejects[i] == (e.sup > e.thresholds[i]));
    }
}

TEST_CASE("scan records per-entry failures and continues") {
    const auto spec = AngularPowerSpectrum::llp1(1.0);
    const CoefficientPanel panel =
        simulate_panel(spec, TemporalModel::iid(), MeanScenario{}, 30, 8, 99);
    const auto entries = multiscale_scan(panel, {0, 99}, 24, toy_table());
    REQUIRE(entries.size() == 2);
    CHECK(entries[0].error.empty());
    CHECK(!entries[1].error.empty());
    CHECK_THROWS_AS((void)multiscale_scan(panel, {}, 24, toy_table()), invalid_argument_error);
}

TEST_CASE("surface covariance approaches the limit formula") {
    ExperimentConfig c = small_h0();
    c.n_times = 150;
    c.lmax = 15;
    c.grid = 20;
    c.replicates = 400;
    const std::vector<CovariancePointPair> pairs = {{1.0, 0.5, 1.0, 0.5},
                                                    {0.5, 0.5, 1.0, 0.5}};
    const auto results = covariance_check(c, pairs);
    REQUIRE(results.size() == 2);
    CHECK(results[0].target == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(results[1].target == doctest::Approx(0.125).epsilon(1e-15));
    for (const auto &r : results) {
        CAPTURE(r.empirical);
        CHECK(std::abs(r.empirical - r.target) < 0.06);
        CHECK(std::abs(r.z) < 6.0);
    }
}

TEST_CASE("covariance check demands grid-aligned points and H0") {
    ExperimentConfig c = small_h0();
    c.grid = 10;
    CHECK_THROWS_AS((void)covariance_check(c, {{0.123, 0.5, 1.0, 0.5}}), invalid_argument_error);
    c.hypothesis = ExperimentConfig::Hypothesis::h1;
    c.alpha = 1.0;
    CHECK_THROWS_AS((void)covariance_check(c, {{0.5, 0.5, 1.0, 0.5}}), invalid_argument_error);
}

} // TEST_SUITE
