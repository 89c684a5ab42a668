#include "sphcusum/fields.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "sphcusum/errors.hpp"
#include "sphcusum/rng.hpp"

namespace sphcusum {

std::pair<double, double> ar1_density_bounds(double phi) {
    const double a = std::abs(phi);
    const double two_pi = 2.0 * std::numbers::pi;
    return {(1.0 - a) / (two_pi * (1.0 + a)), (1.0 + a) / (two_pi * (1.0 - a))};
}

void validate_scenario(const MeanScenario &scenario) {
    for (const auto &[lm, trend] : scenario.mu2) {
        (void)lm;
        if (trend.coef != 0.0 && trend.eps_star <= 0.0)
            throw invalid_argument_error("scenario: secondary trend needs eps_star > 0");
    }
    for (const auto &[ell, a] : scenario.alpha) {
        (void)ell;
        if (a < 0.0) throw invalid_argument_error("scenario: alpha must be >= 0");
    }
    bool any_mu1 = false;
    double top = -1.0;
    for (const auto &[lm, v] : scenario.mu1) {
        if (v == 0.0) continue;
        any_mu1 = true;
        const auto it = scenario.alpha.find(lm.first);
        const double a = it == scenario.alpha.end() ? 0.0 : it->second;
        top = std::max(top, a);
    }
    if (!any_mu1) return;
    std::map<int, double> row_sum;
    for (const auto &[lm, v] : scenario.mu1) {
        const auto it = scenario.alpha.find(lm.first);
        const double a = it == scenario.alpha.end() ? 0.0 : it->second;
        if (a == top) row_sum[lm.first] += v;
    }
    for (const auto &[ell, s] : row_sum) {
        if (s == 0.0)
            throw invalid_argument_error(
                "scenario: trend coefficients at ell=" + std::to_string(ell) +
                " sum to zero at the top exponent; the trend would be undetectable by design");
    }
}

double mean_at(const MeanScenario &scenario, int ell, int m, int t) {
    if (t < 1) throw invalid_argument_error("mean_at: t must be >= 1");
    const std::pair<int, int> lm{ell, m};
    double v = 0.0;
    if (const auto it = scenario.mu0.find(lm); it != scenario.mu0.end()) v += it->second;
    const auto ia = scenario.alpha.find(ell);
    const double a = ia == scenario.alpha.end() ? 0.0 : ia->second;
    if (const auto it = scenario.mu1.find(lm); it != scenario.mu1.end())
        v += it->second * std::pow(static_cast<double>(t), a);
    if (const auto it = scenario.mu2.find(lm); it != scenario.mu2.end()) {
        const auto &sec = it->second;
        if (sec.coef != 0.0)
            v += sec.coef * std::pow(static_cast<double>(t), a - sec.eps_star) *
                 std::pow(std::log(static_cast<double>(t)), sec.log_pow);
    }
    return v;
}

MeanScenario scenario_preset(int model_id, bool time_varying, double alpha, int lmax) {
    if (model_id < 1 || model_id > 3)
        throw invalid_argument_error("scenario_preset: model_id must be 1, 2, or 3");
    MeanScenario s;
    auto &target = time_varying ? s.mu1 : s.mu0;
    target[{0, 0}] = 5.0;
    if (model_id == 2) {
        for (int ell = 2; ell <= lmax; ell += 2)
            target[{ell, 0}] = -2.0 / (static_cast<double>(ell) * (ell + 1.0));
    } else if (model_id == 3) {
        for (int ell = 1; ell <= lmax; ++ell)
            target[{ell, 0}] = -2.0 / (static_cast<double>(ell) * (ell + 1.0));
    }
    if (time_varying) {
        if (alpha < 0.0) throw invalid_argument_error("scenario_preset: alpha must be >= 0");
        for (const auto &[lm, v] : s.mu1) {
            (void)v;
            s.alpha[lm.first] = alpha;
        }
    }
    validate_scenario(s);
    return s;
}

CoefficientPanel simulate_panel(const AngularPowerSpectrum &spectrum,
                                const TemporalModel &temporal,
                                const MeanScenario &scenario,
                                int n_times, int lmax, std::uint64_t seed) {
    if (n_times < 2) throw invalid_argument_error("simulate_panel: need n_times >= 2");
    if (lmax < 0) throw invalid_argument_error("simulate_panel: need lmax >= 0");
    if (temporal.kind == TemporalModel::Kind::ar1 && std::abs(temporal.phi) > 0.95)
        throw invalid_argument_error("simulate_panel: |phi| must be <= 0.95");
    validate_scenario(scenario);

    CoefficientPanel panel(lmax, n_times);
    for (int ell = 0; ell <= lmax; ++ell) {
        const double c = spectrum(ell);
        if (!(c >= 0.0) || !std::isfinite(c))
            throw runtime_model_error("simulate_panel: C_" + std::to_string(ell) +
                                      " is undefined or negative");
        const double sd = std::sqrt(c);
        for (int m = -ell; m <= ell; ++m) {
            SubstreamRng rng(seed, static_cast<std::uint64_t>(CoefficientPanel::index(ell, m)));
            double *row = panel.values.data() +
                          static_cast<std::size_t>(CoefficientPanel::index(ell, m)) * n_times;
            if (temporal.kind == TemporalModel::Kind::iid) {
                for (int t = 1; t <= n_times; ++t)
                    row[t - 1] = sd * rng.next_normal();
            } else {
                const double phi = temporal.phi;
                const double innov = sd * std::sqrt(1.0 - phi * phi);
                double a = sd * rng.next_normal(); // stationary start
                row[0] = a;
                for (int t = 2; t <= n_times; ++t) {
                    a = phi * a + innov * rng.next_normal();
                    row[t - 1] = a;
                }
            }
            const bool has_mean = scenario.mu0.count({ell, m}) || scenario.mu1.count({ell, m}) ||
                                  scenario.mu2.count({ell, m});
            if (has_mean) {
                for (int t = 1; t <= n_times; ++t)
                    row[t - 1] += mean_at(scenario, ell, m, t);
            }
        }
    }
    return panel;
}

} // namespace sphcusum
