#pragma once

#include <functional>

namespace sphcusum {

// Per-multipole variance C_l. The l(l+1) rule is C_l = 2/(l(l+1)); power
// law is C_l = l^-eta. c0 covers l = 0, which neither rule defines.
struct AngularPowerSpectrum {
    enum class Rule { llp1, power_law, custom };

    Rule rule = Rule::llp1;
    double c0 = 1.0;
    double eta = 0.0;                        // power_law only
    std::function<double(int)> custom_fn;    // custom only

    double operator()(int ell) const;

    static AngularPowerSpectrum llp1(double c0 = 1.0);
    static AngularPowerSpectrum power_law(double eta, double c0 = 1.0);
    static AngularPowerSpectrum custom(std::function<double(int)> fn, double c0 = 1.0);
};

// Pixelization-error diagnostic: ratio = (1/C_L) sum_{l > lstar} (2l+1) C_l.
// When the weighted tail sum does not converge fast enough to meet the
// 1e-12 relative target (the l(l+1) rule is the boundary case), the sum is
// truncated at ell_cap = 10^6 and flagged.
struct TailDiagnostic {
    double ratio = 0.0;
    bool truncated = false;
    long ell_cap = 0;
};

TailDiagnostic tail_regularity_diagnostic(const AngularPowerSpectrum &spectrum, int L, int lstar);

} // namespace sphcusum
