#pragma once

#include <cstddef>
#include <vector>

namespace sphcusum {

// Time series of spherical-harmonic coefficients: (lmax+1)^2 series of
// length n_times, stored series-major so one (l,m) row is contiguous.
struct CoefficientPanel {
    int lmax = 0;
    int n_times = 0;
    std::vector<double> values;

    CoefficientPanel() = default;
    CoefficientPanel(int lmax_, int n_times_)
        : lmax(lmax_), n_times(n_times_),
          values(static_cast<std::size_t>((lmax_ + 1)) * (lmax_ + 1) * n_times_, 0.0) {}

    static int index(int ell, int m) { return ell * (ell + 1) + m; }
    int n_series() const { return (lmax + 1) * (lmax + 1); }

    // t is 1-based throughout.
    double &at(int ell, int m, int t) {
        return values[static_cast<std::size_t>(index(ell, m)) * n_times + (t - 1)];
    }
    double at(int ell, int m, int t) const {
        return values[static_cast<std::size_t>(index(ell, m)) * n_times + (t - 1)];
    }
    const double *series(int ell, int m) const {
        return values.data() + static_cast<std::size_t>(index(ell, m)) * n_times;
    }
};

} // namespace sphcusum
