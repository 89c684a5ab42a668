#include "sphcusum/harmonics.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>

#include "sphcusum/errors.hpp"
#include "sphcusum/panel.hpp"

namespace sphcusum {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kFourPi = 4.0 * std::numbers::pi;

int tri_index(int ell, int m) { return ell * (ell + 1) / 2 + m; }

using MatrixRM = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

} // namespace

double CubatureGrid::weight(int k) const {
    return theta_wts[k / n_phi()] * (2.0 * kPi / n_phi());
}

void gauss_legendre(int n, std::vector<double> &nodes, std::vector<double> &weights) {
    if (n < 1) throw invalid_argument_error("gauss_legendre: n must be >= 1");
    nodes.assign(n, 0.0);
    weights.assign(n, 0.0);
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(kPi * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p1 = 1.0, p2 = 0.0;
            for (int j = 1; j <= n; ++j) {
                const double p3 = p2;
                p2 = p1;
                p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
            }
            pp = n * (z * p1 - p2) / (z * z - 1.0);
            const double z1 = z;
            z = z1 - p1 / pp;
            if (std::abs(z - z1) < 1e-15) break;
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
    }
}

void legendre_bar_all(int lmax, double u, std::vector<double> &out) {
    if (lmax < 0) throw invalid_argument_error("legendre_bar_all: lmax must be >= 0");
    if (std::abs(u) > 1.0) throw invalid_argument_error("legendre_bar_all: |u| must be <= 1");
    out.assign(static_cast<std::size_t>(tri_index(lmax, lmax)) + 1, 0.0);
    const double s = std::sqrt(std::max(0.0, 1.0 - u * u));
    out[0] = 1.0 / std::sqrt(kFourPi);
    for (int m = 1; m <= lmax; ++m)
        out[tri_index(m, m)] = s * std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * out[tri_index(m - 1, m - 1)];
    for (int m = 0; m < lmax; ++m)
        out[tri_index(m + 1, m)] = u * std::sqrt(2.0 * m + 3.0) * out[tri_index(m, m)];
    for (int m = 0; m <= lmax; ++m) {
        for (int ell = m + 2; ell <= lmax; ++ell) {
            const double a = std::sqrt((4.0 * ell * ell - 1.0) / (static_cast<double>(ell) * ell - static_cast<double>(m) * m));
            const double b = std::sqrt((static_cast<double>(ell - 1) * (ell - 1) - static_cast<double>(m) * m) /
                                       (4.0 * static_cast<double>(ell - 1) * (ell - 1) - 1.0));
            out[tri_index(ell, m)] = a * (u * out[tri_index(ell - 1, m)] - b * out[tri_index(ell - 2, m)]);
        }
    }
}

double assoc_legendre(int ell, int m, double u) {
    if (m < 0 || m > ell) throw invalid_argument_error("assoc_legendre: need 0 <= m <= ell");
    if (std::abs(u) > 1.0) throw invalid_argument_error("assoc_legendre: |u| must be <= 1");
    std::vector<double> bar;
    legendre_bar_all(ell, u, bar);
    const double norm = std::sqrt((2.0 * ell + 1.0) / kFourPi) *
                        std::exp(0.5 * (std::lgamma(ell - m + 1.0) - std::lgamma(ell + m + 1.0)));
    return bar[tri_index(ell, m)] / norm;
}

double real_sph_harm(int ell, int m, SphericalPoint point) {
    const int am = std::abs(m);
    if (am > ell) throw invalid_argument_error("real_sph_harm: need |m| <= ell");
    std::vector<double> bar;
    legendre_bar_all(ell, std::cos(point.theta), bar);
    const double p = bar[tri_index(ell, am)];
    if (m < 0) return std::sqrt(2.0) * p * std::sin(am * point.phi);
    if (m == 0) return p;
    return std::sqrt(2.0) * p * std::cos(m * point.phi);
}

CubatureGrid build_gauss_grid(int lstar) {
    if (lstar < 0) throw invalid_argument_error("build_gauss_grid: lstar must be >= 0");
    CubatureGrid g;
    g.exactness_order = lstar;
    std::vector<double> nodes, wts;
    gauss_legendre(lstar + 1, nodes, wts);
    const int nt = lstar + 1;
    g.thetas.resize(nt);
    g.theta_wts.resize(nt);
    for (int i = 0; i < nt; ++i) {
        // nodes ascend in u = cos(theta); reverse so colatitude ascends
        g.thetas[i] = std::acos(nodes[nt - 1 - i]);
        g.theta_wts[i] = wts[nt - 1 - i];
    }
    const int np = 2 * lstar + 2;
    g.phis.resize(np);
    for (int j = 0; j < np; ++j) g.phis[j] = 2.0 * kPi * j / np;
    return g;
}

std::vector<double> harmonic_matrix(const CubatureGrid &grid, int lmax) {
    const int nharm = (lmax + 1) * (lmax + 1);
    const int np = grid.n_phi();
    std::vector<double> y(static_cast<std::size_t>(grid.n_points()) * nharm);
    std::vector<double> bar;
    std::vector<double> cosmphi(static_cast<std::size_t>(lmax) + 1), sinmphi(static_cast<std::size_t>(lmax) + 1);
    const double r2 = std::sqrt(2.0);
    for (int i = 0; i < grid.n_theta(); ++i) {
        legendre_bar_all(lmax, std::cos(grid.thetas[i]), bar);
        for (int j = 0; j < np; ++j) {
            const double phi = grid.phis[j];
            for (int m = 0; m <= lmax; ++m) {
                cosmphi[m] = std::cos(m * phi);
                sinmphi[m] = std::sin(m * phi);
            }
            double *row = y.data() + (static_cast<std::size_t>(i) * np + j) * nharm;
            for (int ell = 0; ell <= lmax; ++ell) {
                for (int m = -ell; m <= ell; ++m) {
                    const int am = std::abs(m);
                    const double p = bar[tri_index(ell, am)];
                    double v;
                    if (m < 0) v = r2 * p * sinmphi[am];
                    else if (m == 0) v = p;
                    else v = r2 * p * cosmphi[m];
                    row[CoefficientPanel::index(ell, m)] = v;
                }
            }
        }
    }
    return y;
}

CoefficientPanel analyze(const FieldSnapshot &field, int lmax) {
    const CubatureGrid &grid = *field.grid;
    if (lmax > grid.exactness_order)
        throw invalid_argument_error("analyze: lmax exceeds grid exactness order (aliasing would be uncontrolled)");
    const int npts = grid.n_points();
    const int nharm = (lmax + 1) * (lmax + 1);
    const std::vector<double> y = harmonic_matrix(grid, lmax);

    Eigen::VectorXd w(npts);
    for (int k = 0; k < npts; ++k) w[k] = grid.weight(k);

    CoefficientPanel panel(lmax, field.n_times);
    Eigen::Map<const MatrixRM> Y(y.data(), npts, nharm);
    Eigen::Map<const Eigen::MatrixXd> F(field.samples.data(), npts, field.n_times);
    Eigen::Map<MatrixRM> B(panel.values.data(), nharm, field.n_times);
    B.noalias() = Y.transpose() * (w.asDiagonal() * F);
    return panel;
}

FieldSnapshot synthesize(const CoefficientPanel &panel, const CubatureGrid &grid) {
    const int npts = grid.n_points();
    const int nharm = panel.n_series();
    const std::vector<double> y = harmonic_matrix(grid, panel.lmax);

    FieldSnapshot field;
    field.grid = &grid;
    field.n_times = panel.n_times;
    field.samples.resize(static_cast<std::size_t>(npts) * panel.n_times);
    Eigen::Map<const MatrixRM> Y(y.data(), npts, nharm);
    Eigen::Map<const MatrixRM> B(panel.values.data(), nharm, panel.n_times);
    Eigen::Map<Eigen::MatrixXd> F(field.samples.data(), npts, panel.n_times);
    F.noalias() = Y * B;
    return field;
}

double cubature_residual(const CubatureGrid &grid, int lmax) {
    if (lmax > grid.exactness_order)
        throw invalid_argument_error("cubature_residual: lmax exceeds grid exactness order");
    const int npts = grid.n_points();
    const int nharm = (lmax + 1) * (lmax + 1);
    const std::vector<double> y = harmonic_matrix(grid, lmax);
    Eigen::Map<const MatrixRM> Y(y.data(), npts, nharm);
    Eigen::VectorXd sqw(npts);
    for (int k = 0; k < npts; ++k) sqw[k] = std::sqrt(grid.weight(k));
    MatrixRM Z = sqw.asDiagonal() * Y;
    Eigen::MatrixXd gram(nharm, nharm);
    gram.noalias() = Z.transpose() * Z;
    gram -= Eigen::MatrixXd::Identity(nharm, nharm);
    return gram.cwiseAbs().maxCoeff();
}

} // namespace sphcusum
