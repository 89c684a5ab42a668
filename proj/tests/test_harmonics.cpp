#include <cmath>
#include <numbers>
#include <vector>

#include <doctest.h>

#include "sphcusum/errors.hpp"
#include "sphcusum/harmonics.hpp"
#include "sphcusum/panel.hpp"
#include "sphcusum/rng.hpp"
#include "sphcusum/spectrum.hpp"

using namespace sphcusum;

namespace {

double rel_err(double got, double want) {
    const double scale = std::max(std::abs(want), 1e-300);
    return std::abs(got - want) / scale;
}

// Unnormalized Legendre polynomial P_l(x) by the plain recurrence.
double legendre_p(int ell, double x) {
    double p0 = 1.0, p1 = x;
    if (ell == 0) return p0;
    for (int l = 2; l <= ell; ++l) {
        const double p2 = ((2 * l - 1) * x * p1 - (l - 1) * p0) / l;
        p0 = p1;
        p1 = p2;
    }
    return p1;
}

} // namespace

TEST_SUITE("harmonics") {

// Reference values computed with 60-digit arithmetic from the Rodrigues
// formula, rounded to double.
TEST_CASE("associated legendre against high-precision table") {
    struct Row {
        int l, m;
        double u, p, pbar;
    };
    const Row rows[] = {
        {0, 0, 0.3, 1.0, 0.282094791773878143},
        {2, 0, 1.0, 1.0, 0.630783130505040012},
        {1, 1, 0.5, 0.866025403784438647, 0.299206710301074508},
        {2, 1, 0.2, 0.587877538267962744, 0.151387951321209603},
        {1, 0, 0.72913282034288218, 0.72913282034288218, 0.356256127530392663},
        {1, 1, -0.061442019250355751, 0.998110654321673351, 0.34484139159314467},
        {2, 0, 0.87955023941337851, 0.660412935478197184, 0.416577338866960223},
        {2, 1, 0.70737429785031103, 1.49999957044648114, 0.386274091406227764},
        {2, 2, -0.42203395024787926, 2.46566203451451172, 0.31747387828032238},
        {3, 0, 0.48093194262826255, -0.443304388395811412, -0.330861411765306019},
        {3, 1, 0.43210270433900844, -0.0898707668229893003, -0.0193629673122223895},
        {3, 3, 0.60066030052628361, 7.66573408092988105, 0.213221792279847395},
        {5, 0, -0.69848289519448248, 0.362852401748323713, 0.339485643099725297},
        {5, 1, 0.64709512479895404, -1.68708982380925323, -0.288183418701751434},
        {5, 2, -0.029342572436287684, 1.53518313109153943, 0.0495577929828986766},
        {5, 5, -0.34069719334042425, 694.178039293428214, 0.340942204187844925},
        {8, 0, 0.57893277496172946, 0.157178972818235043, 0.182815904268702058},
        {8, 1, -0.19931679167841332, 2.3335595708709604, 0.319869014609155558},
        {8, 4, -0.86659102216721173, 1461.04577477584031, 0.380382466468570987},
        {8, 8, -0.73418308652501107, 91531.237400199683, 0.0232744306231110364},
        {13, 0, -0.63761410707158483, -0.0205717758483011192, -0.0301542640613512445},
        {13, 1, 0.80532627272436907, 3.81356607786185369, 0.414354950472699851},
        {13, 6, 0.67168985539447545, -950385.120062861728, -0.283559717975401756},
        {13, 13, 0.26946881773993292, 4843328656637.54802, 0.353517874086963903},
        {21, 0, 0.89985160973640732, -0.226242386304142393, -0.418507522501324398},
        {21, 1, 0.16895661894826497, -3.26094290031577955, -0.280641247560961315},
        {21, 10, -0.17601823630283875, -586264378247.844046, -0.075559622139914656},
        {21, 21, -0.70388410911228361, 9.95801888906501777e+21, 0.000491431662085780207},
        {30, 0, -0.4395838848068091, -0.0382332915179832012, -0.0842367637765624916},
        {30, 1, 0.068519501453890852, 3.8291180927908805, 0.276641462398870198},
        {30, 15, 0.55291984028304397, -7.76148237994850982e+20, -0.178792186857081963},
        {30, 30, 0.33752270858437305, 4.76099042643889106e+39, 0.114992593494851538},
    };
    std::vector<double> pbar;
    for (const Row &r : rows) {
        CAPTURE(r.l);
        CAPTURE(r.m);
        CAPTURE(r.u);
        CHECK(rel_err(assoc_legendre(r.l, r.m, r.u), r.p) < 1e-10);
        legendre_bar_all(r.l, r.u, pbar);
        CHECK(rel_err(pbar[r.l * (r.l + 1) / 2 + r.m], r.pbar) < 1e-10);
    }
}

TEST_CASE("legendre parity") {
    SubstreamRng rng(31, 0);
    std::vector<double> plus, minus;
    for (int rep = 0; rep < 8; ++rep) {
        const double u = 2.0 * rng.next_uniform() - 1.0;
        legendre_bar_all(12, u, plus);
        legendre_bar_all(12, -u, minus);
        for (int l = 0; l <= 12; ++l)
            for (int m = 0; m <= l; ++m) {
                const int idx = l * (l + 1) / 2 + m;
                const double sign = ((l + m) % 2 == 0) ? 1.0 : -1.0;
                CHECK(rel_err(minus[idx], sign * plus[idx]) < 1e-12);
            }
    }
}

TEST_CASE("addition theorem ties harmonics to legendre polynomials") {
    SubstreamRng rng(77, 0);
    const double pi = std::numbers::pi;
    for (int rep = 0; rep < 6; ++rep) {
        const SphericalPoint x{std::acos(2.0 * rng.next_uniform() - 1.0),
                               2.0 * pi * rng.next_uniform()};
        const SphericalPoint y{std::acos(2.0 * rng.next_uniform() - 1.0),
                               2.0 * pi * rng.next_uniform()};
        const double cosg = std::cos(x.theta) * std::cos(y.theta) +
                            std::sin(x.theta) * std::sin(y.theta) * std::cos(x.phi - y.phi);
        for (int l = 0; l <= 10; ++l) {
            double sum = 0.0;
            for (int m = -l; m <= l; ++m) sum += real_sph_harm(l, m, x) * real_sph_harm(l, m, y);
            const double want = (2 * l + 1) / (4.0 * pi) * legendre_p(l, cosg);
            CHECK(std::abs(sum - want) < 1e-11);
        }
    }
}

TEST_CASE("gauss nodes and weights match published 5-point values") {
    std::vector<double> x, w;
    gauss_legendre(5, x, w);
    const double xs[] = {-0.906179845938663993, -0.538469310105683091, 0.0,
                         0.538469310105683091, 0.906179845938663993};
    const double ws[] = {0.236926885056189088, 0.478628670499366468, 0.568888888888888889,
                         0.478628670499366468, 0.236926885056189088};
    for (int i = 0; i < 5; ++i) {
        CHECK(std::abs(x[i] - xs[i]) < 1e-14);
        CHECK(std::abs(w[i] - ws[i]) < 1e-14);
    }
    // weights integrate 1 and x^8 exactly on [-1,1] (degree 9 rule)
    for (int n : {1, 2, 7, 20, 65}) {
        gauss_legendre(n, x, w);
        double s0 = 0.0, s8 = 0.0;
        for (int i = 0; i < n; ++i) {
            s0 += w[i];
            s8 += w[i] * std::pow(x[i], 8);
        }
        CHECK(std::abs(s0 - 2.0) < 1e-13);
        if (n >= 5) CHECK(std::abs(s8 - 2.0 / 9.0) < 1e-13);
    }
}

TEST_CASE("cubature integrates harmonic products exactly") {
    for (int lstar : {2, 8, 16, 32}) {
        const CubatureGrid grid = build_gauss_grid(lstar);
        CHECK(grid.n_theta() == lstar + 1);
        CHECK(grid.n_phi() == 2 * lstar + 2);
        CHECK(cubature_residual(grid, lstar) < 1e-9);
    }
}

TEST_CASE("perturbed weights break exactness") {
    CubatureGrid grid = build_gauss_grid(8);
    grid.theta_wts[3] *= 1.0 + 1e-4;
    CHECK(cubature_residual(grid, 8) > 1e-6);
}

TEST_CASE("analyze inverts synthesize on band-limited fields") {
    const int lmax = 12;
    const CubatureGrid grid = build_gauss_grid(16);
    CoefficientPanel panel;
    panel.lmax = lmax;
    panel.n_times = 3;
    panel.values.assign(static_cast<std::size_t>((lmax + 1) * (lmax + 1)) * 3, 0.0);
    SubstreamRng rng(4242, 0);
    for (double &v : panel.values) v = rng.next_normal();
    const FieldSnapshot field = synthesize(panel, grid);
    const CoefficientPanel back = analyze(field, lmax);
    REQUIRE(back.values.size() == panel.values.size());
    for (std::size_t i = 0; i < panel.values.size(); ++i)
        CHECK(std::abs(back.values[i] - panel.values[i]) < 1e-10);
}

TEST_CASE("analyze rejects lmax beyond the grid order") {
    const CubatureGrid grid = build_gauss_grid(4);
    FieldSnapshot field;
    field.grid = &grid;
    field.n_times = 1;
    field.samples.assign(grid.n_points(), 1.0);
    CHECK_THROWS_AS((void)analyze(field, 5), invalid_argument_error);
}

TEST_CASE("constant field maps to the monopole") {
    const CubatureGrid grid = build_gauss_grid(8);
    FieldSnapshot field;
    field.grid = &grid;
    field.n_times = 1;
    field.samples.assign(grid.n_points(), 3.5);
    const CoefficientPanel panel = analyze(field, 8);
    const double want = 3.5 * std::sqrt(4.0 * std::numbers::pi);
    CHECK(std::abs(panel.at(0, 0, 1) - want) < 1e-12);
    for (int l = 1; l <= 8; ++l)
        for (int m = -l; m <= l; ++m) CHECK(std::abs(panel.at(l, m, 1)) < 1e-12);
}

// Tail ratio references from closed-form zeta tails at 20 digits.
TEST_CASE("spectrum tail diagnostic") {
    const auto pl4 = AngularPowerSpectrum::power_law(4.0);
    const TailDiagnostic d1 = tail_regularity_diagnostic(pl4, 10, 100);
    CHECK(!d1.truncated);
    CHECK(rel_err(d1.ratio, 0.99333366498350219173) < 1e-12);

    const auto pl3 = AngularPowerSpectrum::power_law(3.0);
    const TailDiagnostic d2 = tail_regularity_diagnostic(pl3, 10, 100);
    CHECK(!d2.truncated);
    CHECK(rel_err(d2.ratio, 19.949835826583817789) < 1e-12);

    const auto llp1 = AngularPowerSpectrum::llp1(1.0);
    const TailDiagnostic d3 = tail_regularity_diagnostic(llp1, 10, 100);
    CHECK(d3.truncated);
    CHECK(d3.ell_cap == 1000000);
    CHECK(rel_err(d3.ratio, 2024.0878262387416525) < 1e-10);

    // a fast-decaying custom rule converges without hitting the cap
    const auto fast = AngularPowerSpectrum::custom([](int l) { return std::exp(-0.5 * l); });
    const TailDiagnostic d4 = tail_regularity_diagnostic(fast, 4, 12);
    CHECK(!d4.truncated);
    double want = 0.0;
    for (int l = 13; l <= 200; ++l) want += (2.0 * l + 1.0) * std::exp(-0.5 * l);
    CHECK(rel_err(d4.ratio, want / std::exp(-2.0)) < 1e-12);

    // a non-vanishing custom rule is rejected rather than summed forever
    const auto flat = AngularPowerSpectrum::custom([](int) { return 1.0; });
    CHECK_THROWS_AS((void)tail_regularity_diagnostic(flat, 4, 12), runtime_model_error);
}

TEST_CASE("spectrum rules evaluate as documented") {
    const auto llp1 = AngularPowerSpectrum::llp1(2.0);
    CHECK(llp1(0) == 2.0);
    CHECK(rel_err(llp1(3), 2.0 / (3.0 * 4.0)) < 1e-15);
    const auto pl = AngularPowerSpectrum::power_law(2.5, 1.5);
    CHECK(pl(0) == 1.5);
    CHECK(rel_err(pl(2), std::pow(2.0, -2.5)) < 1e-15);
    CHECK_THROWS_AS((void)llp1(-1), invalid_argument_error);
    const auto slow = AngularPowerSpectrum::power_law(-1.0);
    CHECK_THROWS_AS((void)tail_regularity_diagnostic(slow, 4, 12), runtime_model_error);
}

} // TEST_SUITE
