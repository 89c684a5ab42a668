#pragma once

#include <vector>

namespace sphcusum {

// Point on the unit sphere; theta is colatitude (0 at the north pole).
struct SphericalPoint {
    double theta;
    double phi;
};

// Gauss-Legendre nodes in cos(theta) crossed with equispaced longitudes.
// Weighted sums over the points integrate products of harmonics exactly up
// to degree exactness_order.
struct CubatureGrid {
    int exactness_order = 0;
    std::vector<double> thetas;     // n_theta() colatitudes, increasing
    std::vector<double> theta_wts;  // Gauss-Legendre weight per colatitude
    std::vector<double> phis;       // n_phi() longitudes in [0, 2pi)

    int n_theta() const { return static_cast<int>(thetas.size()); }
    int n_phi() const { return static_cast<int>(phis.size()); }
    int n_points() const { return n_theta() * n_phi(); }

    // Flattened point index k = i_theta * n_phi + j_phi.
    SphericalPoint point(int k) const {
        return {thetas[k / n_phi()], phis[k % n_phi()]};
    }
    double weight(int k) const;
};

// Field values on a cubature grid, one slab of grid.n_points() samples per
// time index; samples[(t-1) * n_points + k].
struct FieldSnapshot {
    const CubatureGrid *grid = nullptr;
    int n_times = 0;
    std::vector<double> samples;

    double &at(int k, int t) { return samples[(t - 1) * static_cast<std::size_t>(grid->n_points()) + k]; }
    double at(int k, int t) const { return samples[(t - 1) * static_cast<std::size_t>(grid->n_points()) + k]; }
};

struct CoefficientPanel; // panel.hpp

// Gauss-Legendre nodes and weights on [-1,1], n >= 1 points.
void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights);

// Associated Legendre P_lm(u) without the Condon-Shortley sign, evaluated by
// normalized three-term recurrence (overflows only where P itself does,
// around l ~ 150).
double assoc_legendre(int ell, int m, double u);

// Fully normalized P with the 1/sqrt(4pi) folded in:
//   Pbar_lm = sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_lm.
// Fills out[idx] for l in [0, lmax], m in [0, l], idx = l(l+1)/2 + m.
void legendre_bar_all(int lmax, double u, std::vector<double> &out);

// Real fully normalized harmonic: sqrt(2) Pbar_{l|m|} sin(|m| phi) for m < 0,
// Pbar_{l0} for m = 0, sqrt(2) Pbar_{lm} cos(m phi) for m > 0.
double real_sph_harm(int ell, int m, SphericalPoint point);

CubatureGrid build_gauss_grid(int lstar);

// Forward transform: beta_lm(t) = sum_k field(k,t) Y_lm(k) w_k, exact for
// fields band-limited to the grid's exactness order. Errors if lmax exceeds
// that order.
CoefficientPanel analyze(const FieldSnapshot &field, int lmax);

// Pointwise sum of panel(l,m,t) Y_lm over all panel entries.
FieldSnapshot synthesize(const CoefficientPanel &panel, const CubatureGrid &grid);

// Max abs deviation of the discrete Gram matrix of {Y_lm : l <= lmax} from
// identity under the grid's weights.
double cubature_residual(const CubatureGrid &grid, int lmax);

// Dense (n_points x (lmax+1)^2) matrix of Y values, harmonic index
// l*(l+1)+m, point index as in FieldSnapshot. Shared by analyze/synthesize
// and useful for evaluating fields on arbitrary point sets.
std::vector<double> harmonic_matrix(const CubatureGrid &grid, int lmax);

} // namespace sphcusum
