#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <utility>

#include "sphcusum/panel.hpp"
#include "sphcusum/spectrum.hpp"

namespace sphcusum {

struct TemporalModel {
    enum class Kind { iid, ar1 };
    Kind kind = Kind::iid;
    double phi = 0.0; // AR coefficient, |phi| <= 0.95

    static TemporalModel iid() { return {Kind::iid, 0.0}; }
    static TemporalModel ar1(double phi) { return {Kind::ar1, phi}; }
};

// Closed-form bounds of the AR(1) normalized spectral density
// (1-phi^2)/(2pi (1 - 2 phi cos(x) + phi^2)); uniform boundedness above and
// below is what keeps studentization well behaved.
std::pair<double, double> ar1_density_bounds(double phi);

// Mean expansion mu_lm(t) = mu0 + mu1 t^alpha_l + mu2_coef t^(alpha_l - eps) log(t)^k.
struct MeanScenario {
    std::map<std::pair<int, int>, double> mu0;
    std::map<std::pair<int, int>, double> mu1;
    std::map<int, double> alpha; // per-l exponent used by mu1 and mu2

    struct SecondaryTrend {
        double coef = 0.0;
        double eps_star = 0.0; // > 0
        double log_pow = 0.0;
    };
    std::map<std::pair<int, int>, SecondaryTrend> mu2;
};

// Enforces: alpha >= 0, eps_star > 0, and when mu1 is nonzero every l
// carrying the top exponent has sum_m mu1(l,m) != 0 (without this the
// consistency guarantee is vacuous).
void validate_scenario(const MeanScenario &scenario);

double mean_at(const MeanScenario &scenario, int ell, int m, int t);

// Simulation presets: model 1 touches (0,0) only; model 2 adds the even
// multipoles l <= lmax at m = 0; model 3 all l = 1..lmax at m = 0.
// Static presets put values in mu0; time-varying ones move them to mu1 with
// the common exponent alpha.
MeanScenario scenario_preset(int model_id, bool time_varying, double alpha, int lmax);

// Gaussian coefficient panel: independent across (l,m), Var = C_l, iid or
// stationary AR(1) in t, plus mean_at. Bit-reproducible from seed; series
// (l,m) draws from substream (seed, l(l+1)+m).
CoefficientPanel simulate_panel(const AngularPowerSpectrum &spectrum,
                                const TemporalModel &temporal,
                                const MeanScenario &scenario,
                                int n_times, int lmax, std::uint64_t seed);

} // namespace sphcusum
