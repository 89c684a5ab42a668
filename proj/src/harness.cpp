#include "sphcusum/harness.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "sphcusum/errors.hpp"
#include "sphcusum/parallel.hpp"
#include "sphcusum/pillowcase.hpp"
#include "sphcusum/rng.hpp"

namespace sphcusum {

namespace {

constexpr std::uint64_t kReplicateDomain = 0x7265706cu; // distinct child-seed domain

MeanScenario config_scenario(const ExperimentConfig &config) {
    const bool time_varying = config.hypothesis == ExperimentConfig::Hypothesis::h1;
    return scenario_preset(config.model_id, time_varying, config.alpha, config.lmax);
}

void validate_config(const ExperimentConfig &config) {
    if (config.replicates < 1) throw invalid_argument_error("experiment: replicates must be >= 1");
    if (config.n_times < 2) throw invalid_argument_error("experiment: n_times must be >= 2");
    if (config.lmax < config.lmin) throw invalid_argument_error("experiment: lmax must be >= lmin");
    if (config.grid < 1) throw invalid_argument_error("experiment: grid must be >= 1");
}

std::vector<StatisticSurface> replicate_surfaces(const ExperimentConfig &config) {
    const MeanScenario scenario = config_scenario(config);
    std::vector<StatisticSurface> out(config.replicates);
    parallel_for(config.replicates, config.n_threads, [&](int i) {
        try {
            const std::uint64_t child = derive_seed(config.seed, static_cast<std::uint64_t>(i),
                                                    kReplicateDomain);
            const CoefficientPanel panel = simulate_panel(config.spectrum, config.temporal,
                                                          scenario, config.n_times, config.lmax,
                                                          child);
            out[i] = statistic_surface(panel, config.lmin, config.grid, config.grid);
        } catch (const std::exception &e) {
            throw runtime_model_error("replicate " + std::to_string(i) + ": " + e.what());
        }
    });
    return out;
}

} // namespace

RejectionTable run_rejection_experiment(const ExperimentConfig &config,
                                        const QuantileTable &table) {
    validate_config(config);
    if (table.levels.empty()) throw invalid_argument_error("experiment: quantile table has no levels");
    const auto t0 = std::chrono::steady_clock::now();

    const MeanScenario scenario = config_scenario(config);
    RejectionTable result;
    result.levels = table.levels;
    result.thresholds = table.thresholds;
    result.sups.assign(config.replicates, 0.0);
    parallel_for(config.replicates, config.n_threads, [&](int i) {
        try {
            const std::uint64_t child = derive_seed(config.seed, static_cast<std::uint64_t>(i),
                                                    kReplicateDomain);
            const CoefficientPanel panel = simulate_panel(config.spectrum, config.temporal,
                                                          scenario, config.n_times, config.lmax,
                                                          child);
            result.sups[i] = sup_statistic(statistic_surface(panel, config.lmin, config.grid,
                                                             config.grid));
        } catch (const std::exception &e) {
            throw runtime_model_error("replicate " + std::to_string(i) + ": " + e.what());
        }
    });

    const double b = config.replicates;
    for (std::size_t lv = 0; lv < table.levels.size(); ++lv) {
        long count = 0;
        for (const double s : result.sups)
            if (s > table.thresholds[lv]) ++count;
        const double p = count / b;
        result.frequencies.push_back(p);
        result.standard_errors.push_back(std::sqrt(p * (1.0 - p) / b));
    }
    result.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return result;
}

std::vector<ScanEntry> multiscale_scan(const CoefficientPanel &panel,
                                       const std::vector<int> &lmin_list, int grid,
                                       const QuantileTable &table) {
    if (lmin_list.empty()) throw invalid_argument_error("scan: lmin list must be nonempty");
    std::vector<ScanEntry> entries;
    entries.reserve(lmin_list.size());
    for (const int lmin : lmin_list) {
        ScanEntry entry;
        entry.lmin = lmin;
        try {
            const StatisticSurface surf = statistic_surface(panel, lmin, grid, grid);
            entry.sup = sup_statistic(surf);
            entry.levels = table.levels;
            entry.thresholds = table.thresholds;
            for (const double thr : table.thresholds)
                entry.rejects.push_back(entry.sup > thr);
        } catch (const std::exception &e) {
            entry.error = e.what();
        }
        entries.push_back(std::move(entry));
    }
    return entries;
}

std::vector<CovarianceCheckResult> covariance_check(const ExperimentConfig &config,
                                                    const std::vector<CovariancePointPair> &pairs) {
    validate_config(config);
    if (config.hypothesis != ExperimentConfig::Hypothesis::h0)
        throw invalid_argument_error("covariance_check: requires an H0 config");

    const std::vector<StatisticSurface> surfaces = replicate_surfaces(config);
    const auto node = [&](double x, const char *what) {
        const double scaled = x * config.grid;
        const long j = std::lround(scaled);
        if (std::abs(scaled - j) > 1e-9)
            throw invalid_argument_error(std::string("covariance_check: ") + what +
                                         " does not lie on the evaluation grid");
        return static_cast<int>(j);
    };

    std::vector<CovarianceCheckResult> out;
    const double b = config.replicates;
    for (const auto &pair : pairs) {
        const int j1 = node(pair.r1, "r1"), k1 = node(pair.s1, "s1");
        const int j2 = node(pair.r2, "r2"), k2 = node(pair.s2, "s2");
        std::vector<double> x(surfaces.size()), y(surfaces.size());
        for (std::size_t i = 0; i < surfaces.size(); ++i) {
            x[i] = surfaces[i].at(j1, k1);
            y[i] = surfaces[i].at(j2, k2);
        }
        double mx = 0.0, my = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += x[i];
            my += y[i];
        }
        mx /= b;
        my /= b;
        double sum_p = 0.0, sum_p2 = 0.0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            const double p = (x[i] - mx) * (y[i] - my);
            sum_p += p;
            sum_p2 += p * p;
        }
        CovarianceCheckResult r;
        r.pair = pair;
        r.empirical = sum_p / (b - 1.0);
        r.target = pillowcase_covariance(pair.r1, pair.s1, pair.r2, pair.s2);
        const double var_p = sum_p2 / b - (sum_p / b) * (sum_p / b);
        const double se = std::sqrt(std::max(var_p, 0.0) / b);
        r.z = se > 0.0 ? (r.empirical - r.target) / se : 0.0;
        out.push_back(r);
    }
    return out;
}

} // namespace sphcusum
