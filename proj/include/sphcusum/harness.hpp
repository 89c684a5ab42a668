#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "sphcusum/cusum.hpp"
#include "sphcusum/fields.hpp"
#include "sphcusum/panel.hpp"
#include "sphcusum/quantile_table.hpp"

namespace sphcusum {

struct ExperimentConfig {
    enum class Hypothesis { h0, h1 };

    Hypothesis hypothesis = Hypothesis::h0;
    int model_id = 1;
    double alpha = 0.0; // trend exponent, h1 only
    int n_times = 100;
    int lmax = 30;
    int lmin = 0;
    int grid = 300;
    int replicates = 100;
    AngularPowerSpectrum spectrum = AngularPowerSpectrum::llp1();
    TemporalModel temporal = TemporalModel::iid();
    std::uint64_t seed = 0;
    int n_threads = 1;
};

struct RejectionTable {
    std::vector<double> levels;
    std::vector<double> thresholds;
    std::vector<double> frequencies;
    std::vector<double> standard_errors; // sqrt(p(1-p)/B)
    std::vector<double> sups;            // per replicate, index order
    double wall_time_s = 0.0;
};

// One simulated panel per replicate (child seed derived from (seed,
// replicate index)), sup of the statistic surface, frequency of sup >
// threshold per level. Replicate failures abort with the index attached;
// silently resampling would bias the frequencies.
RejectionTable run_rejection_experiment(const ExperimentConfig &config,
                                        const QuantileTable &table);

struct ScanEntry {
    int lmin = 0;
    double sup = 0.0;
    std::vector<double> levels;
    std::vector<double> thresholds;
    std::vector<bool> rejects;
    std::string error; // nonempty if this entry failed; scan continues
};

// sup + decisions for each lmin in turn; the sample power spectrum is the
// same across entries, only the summation start moves.
std::vector<ScanEntry> multiscale_scan(const CoefficientPanel &panel,
                                       const std::vector<int> &lmin_list, int grid,
                                       const QuantileTable &table);

struct CovariancePointPair {
    double r1, s1, r2, s2;
};

struct CovarianceCheckResult {
    CovariancePointPair pair;
    double empirical = 0.0;
    double target = 0.0;
    double z = 0.0;
};

// Empirical covariance of surface values across H0 replicates against the
// limit covariance (r ^ r')((s ^ s') - s s'); z is (empirical - target)
// over the MC standard error of the product mean.
std::vector<CovarianceCheckResult> covariance_check(const ExperimentConfig &config,
                                                    const std::vector<CovariancePointPair> &pairs);

} // namespace sphcusum
