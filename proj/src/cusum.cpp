#include "sphcusum/cusum.hpp"

#include <cmath>
#include <string>

#include "sphcusum/errors.hpp"

namespace sphcusum {

double QuantileTable::threshold_for(double level) const {
    for (std::size_t i = 0; i < levels.size(); ++i)
        if (std::abs(levels[i] - level) <= 1e-12) return thresholds[i];
    throw invalid_argument_error("quantile table has no level " + std::to_string(level));
}

std::vector<double> harmonic_averages(const CoefficientPanel &panel) {
    if (panel.n_times < 1) throw invalid_argument_error("harmonic_averages: empty panel");
    const int n = panel.n_series();
    std::vector<double> mu(n, 0.0);
    for (int i = 0; i < n; ++i) {
        const double *row = panel.values.data() + static_cast<std::size_t>(i) * panel.n_times;
        double s = 0.0;
        for (int t = 0; t < panel.n_times; ++t) s += row[t];
        mu[i] = s / panel.n_times;
    }
    return mu;
}

SamplePowerSpectrum sample_power_spectrum(const CoefficientPanel &panel) {
    if (panel.n_times < 2) throw invalid_argument_error("sample_power_spectrum: need n_times >= 2");
    const std::vector<double> mu = harmonic_averages(panel);
    SamplePowerSpectrum sp;
    sp.cbar.assign(panel.lmax + 1, 0.0);
    for (int ell = 0; ell <= panel.lmax; ++ell) {
        double s = 0.0;
        for (int m = -ell; m <= ell; ++m) {
            const int idx = CoefficientPanel::index(ell, m);
            const double *row = panel.values.data() + static_cast<std::size_t>(idx) * panel.n_times;
            const double mean = mu[idx];
            for (int t = 0; t < panel.n_times; ++t) {
                const double d = row[t] - mean;
                s += d * d;
            }
        }
        sp.cbar[ell] = s / (static_cast<double>(panel.n_times) * (2 * ell + 1));
    }
    return sp;
}

StatisticSurface statistic_surface(const CoefficientPanel &panel, int lmin,
                                   int grid_r, int grid_s) {
    const int N = panel.n_times;
    const int L = panel.lmax;
    if (N < 2) throw invalid_argument_error("statistic_surface: need n_times >= 2");
    if (L < 1) throw invalid_argument_error("statistic_surface: normalization needs lmax >= 1");
    if (lmin < 0 || lmin > L)
        throw invalid_argument_error("statistic_surface: need 0 <= lmin <= lmax");
    if (grid_r < 1 || grid_s < 1)
        throw invalid_argument_error("statistic_surface: grids must be >= 1");

    const std::vector<double> mu = harmonic_averages(panel);
    const SamplePowerSpectrum sp = sample_power_spectrum(panel);
    for (int ell = lmin; ell <= L; ++ell) {
        if (sp.cbar[ell] <= 0.0)
            throw runtime_model_error("degenerate multipole ell=" + std::to_string(ell) +
                                      ": sample power spectrum is zero");
    }

    // prefix[i][t] = sum over l in [lmin, lmin+i), t' in [1, t] of the
    // studentized per-(l, t') reduction
    const int nl = L - lmin + 1;
    std::vector<double> prefix(static_cast<std::size_t>(nl + 1) * (N + 1), 0.0);
    const auto P = [&](int i, int t) -> double & {
        return prefix[static_cast<std::size_t>(i) * (N + 1) + t];
    };
    for (int i = 1; i <= nl; ++i) {
        const int ell = lmin + i - 1;
        const double scale = 1.0 / std::sqrt((2.0 * ell + 1.0) * sp.cbar[ell]);
        for (int t = 1; t <= N; ++t) {
            double x = 0.0;
            for (int m = -ell; m <= ell; ++m) {
                const int idx = CoefficientPanel::index(ell, m);
                x += panel.values[static_cast<std::size_t>(idx) * N + (t - 1)] - mu[idx];
            }
            P(i, t) = P(i, t - 1) + scale * x;
        }
        for (int t = 0; t <= N; ++t) P(i, t) += P(i - 1, t);
    }

    StatisticSurface surf;
    surf.grid_r = grid_r;
    surf.grid_s = grid_s;
    surf.N = N;
    surf.L = L;
    surf.lmin = lmin;
    surf.values.assign(static_cast<std::size_t>(grid_r + 1) * (grid_s + 1), 0.0);
    const double norm = 1.0 / std::sqrt(static_cast<double>(N) * L);
    for (int j = 0; j <= grid_r; ++j) {
        const int lr = static_cast<int>((static_cast<long>(L) * j) / grid_r);
        if (lr < lmin) continue;
        double *row = surf.values.data() + static_cast<std::size_t>(j) * (grid_s + 1);
        for (int k = 1; k < grid_s; ++k) {
            const int ns = static_cast<int>((static_cast<long>(N) * k) / grid_s);
            if (ns < 1) continue;
            row[k] = norm * P(lr - lmin + 1, ns);
        }
        // k = 0 is an empty time sum; k = grid_s is exactly zero by
        // full-sample centering; both stay literal 0.0
    }
    return surf;
}

double sup_statistic(const StatisticSurface &surface) {
    double m = 0.0;
    for (const double v : surface.values) m = std::max(m, std::abs(v));
    return m;
}

Decision decide(double sup, const QuantileTable &table, double level) {
    const double thr = table.threshold_for(level);
    return {sup > thr, thr};
}

} // namespace sphcusum
