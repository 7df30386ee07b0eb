#pragma once
// Shadowed-Rician fading: MGF derivative, power sampling and the ergodic
// capacity of a single frame.

#include <optional>
#include <vector>

#include "leocap/rng.hpp"

namespace leocap {

struct FadingParams {
    double b0;     // half the scattering power
    double m;      // Nakagami parameter of the LOS amplitude
    double omega;  // LOS power

    FadingParams(double b0_, double m_, double omega_);

    double mean_power() const { return omega + 2.0 * b0; }
};

/// "Average shadowing" preset.
inline FadingParams average_shadowing() { return {0.126, 10.1, 0.835}; }

struct LinkBudget {
    double gamma;  // transmit SNR, linear
    double ell;    // path loss d^2, m^2

    LinkBudget(double gamma_, double ell_);

    double snr() const { return gamma / ell; }
};

/// Exponential integral E1(x) for x > 0.
double exponential_e1(double x);

/// Exponential integral Ei(x) for x < 0; equals -E1(-x).
double exponential_integral(double x);

/// E[X exp(-sX)] for the shadowed-Rician power X, i.e. -dM/ds of its Laplace MGF.
double mgf_derivative(double s, const FadingParams& p);

/// One draw of |h|^2 = |sqrt(W) e^{j theta} + z|^2.
double sample_power(const FadingParams& p, RngStream& rng);

/// E[log2(1 + snr |h|^2)] by adaptive Gauss-Kronrod quadrature of the
/// exponential-integral form. Throws NumericalError if the quadrature misses
/// its tolerance.
double instantaneous_capacity(const LinkBudget& link, const FadingParams& p);

/// Same as above with `fading == nullopt` meaning a unit-gain AWGN link.
double instantaneous_capacity(double snr, const std::optional<FadingParams>& fading);

/// Frame capacity as a function of snr = gamma / ell.
///
/// Tabulates ln C on a uniform grid in ln(snr) and interpolates with cubic
/// Lagrange polynomials; outside the table the quadrature is evaluated
/// directly. Immutable once built, so sharing across threads is safe.
class CapacityCurve {
public:
    explicit CapacityCurve(std::optional<FadingParams> fading, double log_snr_min = -24.0,
                           double log_snr_max = 24.0, int nodes_per_unit = 64);

    double operator()(double snr) const;

    const std::optional<FadingParams>& fading() const { return fading_; }

private:
    std::optional<FadingParams> fading_;
    double x0_ = 0.0;
    double step_ = 1.0;
    std::vector<double> log_capacity_;
};

} // namespace leocap
