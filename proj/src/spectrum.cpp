#include "sphcusum/spectrum.hpp"

#include <cmath>

#include "sphcusum/errors.hpp"

namespace sphcusum {

namespace {

constexpr long kHardCap = 1000000;

// sum_{j >= a} j^-s for s > 1 by Euler-Maclaurin after summing the head up
// to j = 64: tail = a'^{1-s}/(s-1) + a'^-s/2 + correction terms in B2, B4.
double zeta_tail(double s, long a) {
    double head = 0.0;
    long j = a;
    while (j < 64) {
        head += std::pow(static_cast<double>(j), -s);
        ++j;
    }
    const double x = static_cast<double>(j);
    double t = std::pow(x, 1.0 - s) / (s - 1.0) + 0.5 * std::pow(x, -s);
    t += s / 12.0 * std::pow(x, -s - 1.0);
    t -= s * (s + 1.0) * (s + 2.0) / 720.0 * std::pow(x, -s - 3.0);
    return head + t;
}

} // namespace

double AngularPowerSpectrum::operator()(int ell) const {
    if (ell < 0) throw invalid_argument_error("spectrum: ell must be >= 0");
    if (ell == 0) return c0;
    switch (rule) {
    case Rule::llp1:
        return 2.0 / (static_cast<double>(ell) * (ell + 1.0));
    case Rule::power_law:
        return std::pow(static_cast<double>(ell), -eta);
    case Rule::custom:
        return custom_fn(ell);
    }
    return 0.0;
}

AngularPowerSpectrum AngularPowerSpectrum::llp1(double c0) {
    AngularPowerSpectrum s;
    s.rule = Rule::llp1;
    s.c0 = c0;
    return s;
}

AngularPowerSpectrum AngularPowerSpectrum::power_law(double eta, double c0) {
    AngularPowerSpectrum s;
    s.rule = Rule::power_law;
    s.eta = eta;
    s.c0 = c0;
    return s;
}

AngularPowerSpectrum AngularPowerSpectrum::custom(std::function<double(int)> fn, double c0) {
    AngularPowerSpectrum s;
    s.rule = Rule::custom;
    s.custom_fn = std::move(fn);
    s.c0 = c0;
    return s;
}

TailDiagnostic tail_regularity_diagnostic(const AngularPowerSpectrum &spectrum, int L, int lstar) {
    if (lstar <= L) throw invalid_argument_error("tail_regularity_diagnostic: need lstar > L");
    const double cL = spectrum(L);
    if (!(cL > 0.0))
        throw runtime_model_error("tail_regularity_diagnostic: C_L is zero, ratio undefined");

    TailDiagnostic d;
    if (spectrum.rule == AngularPowerSpectrum::Rule::power_law) {
        if (spectrum.eta <= 0.0)
            throw runtime_model_error("tail_regularity_diagnostic: spectrum does not decay");
        if (spectrum.eta > 2.0) {
            // closed form: sum (2l+1) l^-eta = 2 zeta(eta-1, .) + zeta(eta, .)
            const double s = 2.0 * zeta_tail(spectrum.eta - 1.0, lstar + 1) +
                             zeta_tail(spectrum.eta, lstar + 1);
            d.ratio = s / cL;
            d.ell_cap = -1; // closed form, no cap
            return d;
        }
        // 0 < eta <= 2: weighted tail diverges; report the capped sum
        double s = 0.0;
        for (long ell = lstar + 1; ell <= kHardCap; ++ell)
            s += (2.0 * ell + 1.0) * std::pow(static_cast<double>(ell), -spectrum.eta);
        d.ratio = s / cL;
        d.truncated = true;
        d.ell_cap = kHardCap;
        return d;
    }
    if (spectrum.rule == AngularPowerSpectrum::Rule::llp1) {
        // (2l+1) 2/(l(l+1)) = 2 (1/l + 1/(l+1)); harmonic tail diverges
        double s = 0.0;
        for (long ell = kHardCap; ell > lstar; --ell)
            s += 2.0 * (1.0 / ell + 1.0 / (ell + 1.0));
        d.ratio = s / cL;
        d.truncated = true;
        d.ell_cap = kHardCap;
        return d;
    }

    // custom rule: adaptive block summation with a decay check
    double total = 0.0;
    double prev_block = -1.0;
    long ell = lstar + 1;
    const long block_len = 4096;
    while (ell <= kHardCap) {
        double block = 0.0;
        const long end = std::min(kHardCap, ell + block_len - 1);
        for (; ell <= end; ++ell) {
            const double c = spectrum(static_cast<int>(ell));
            if (c < 0.0) throw runtime_model_error("tail_regularity_diagnostic: negative C_l");
            block += (2.0 * ell + 1.0) * c;
        }
        total += block;
        if (block <= 1e-13 * total) {
            d.ratio = total / cL;
            d.ell_cap = end;
            return d;
        }
        if (prev_block >= 0.0 && block > prev_block && block > 1e-300)
            throw runtime_model_error("tail_regularity_diagnostic: spectrum does not decay");
        prev_block = block;
    }
    d.ratio = total / cL;
    d.truncated = true;
    d.ell_cap = kHardCap;
    return d;
}

} // namespace sphcusum
