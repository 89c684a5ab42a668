#pragma once

#include <vector>

#include "sphcusum/panel.hpp"
#include "sphcusum/quantile_table.hpp"

namespace sphcusum {

// Two-parameter CUSUM statistic evaluated on the closed grid r_j = j/grid_r,
// s_k = k/grid_s. The s = 0 and s = 1 edges are exactly zero (empty sum and
// full-sample centering); the r = 0 edge is zero when lmin >= 1 and holds
// only the monopole term when lmin = 0.
struct StatisticSurface {
    int grid_r = 0;
    int grid_s = 0;
    int N = 0;
    int L = 0;
    int lmin = 0;
    std::vector<double> values; // (grid_r+1) x (grid_s+1), row-major in j

    double at(int j, int k) const {
        return values[static_cast<std::size_t>(j) * (grid_s + 1) + k];
    }
};

struct SamplePowerSpectrum {
    std::vector<double> cbar; // index l = 0..lmax
};

// mu_hat_lm = (1/N) sum_t beta_lm(t); indexed by CoefficientPanel::index.
std::vector<double> harmonic_averages(const CoefficientPanel &panel);

// cbar_l = (1/(N (2l+1))) sum_t sum_m (beta_lm(t) - mu_hat_lm)^2.
SamplePowerSpectrum sample_power_spectrum(const CoefficientPanel &panel);

// A(r_j, s_k) = (N L)^{-1/2} sum_{t <= floor(N s_k)} sum_{l = lmin}^{floor(L r_j)}
//              (2l+1)^{-1/2} sum_m (beta_lm(t) - mu_hat_lm) / sqrt(cbar_l),
// L = panel.lmax. Computed by a 2-D prefix sum after the per-(l,t)
// reduction. Errors with the offending l if any cbar_l vanishes on
// [lmin, lmax].
StatisticSurface statistic_surface(const CoefficientPanel &panel, int lmin,
                                   int grid_r, int grid_s);

// Max of |A| over all grid nodes.
double sup_statistic(const StatisticSurface &surface);

struct Decision {
    bool reject = false;
    double threshold = 0.0;
};

// Strict comparison: reject iff sup > threshold(level).
Decision decide(double sup, const QuantileTable &table, double level);

} // namespace sphcusum
