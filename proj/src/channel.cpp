#include "leocap/channel.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <utility>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "leocap/errors.hpp"

namespace leocap {

FadingParams::FadingParams(double b0_, double m_, double omega_) : b0(b0_), m(m_), omega(omega_) {
    if (!(b0 > 0.0) || !(m > 0.0) || !(omega >= 0.0) || !std::isfinite(b0) ||
        !std::isfinite(m) || !std::isfinite(omega))
        throw DomainError("FadingParams: need b0 > 0, m > 0, omega >= 0");
}

LinkBudget::LinkBudget(double gamma_, double ell_) : gamma(gamma_), ell(ell_) {
    if (!(gamma > 0.0) || !(ell > 0.0)) throw DomainError("LinkBudget: need gamma > 0, ell > 0");
}

double exponential_e1(double x) {
    if (!(x > 0.0)) throw DomainError("exponential_e1: argument must be positive");
    return -std::expint(-x);
}

double exponential_integral(double x) {
    if (!(x < 0.0)) throw DomainError("exponential_integral: only negative arguments are supported");
    return -exponential_e1(-x);
}

double mgf_derivative(double s, const FadingParams& p) {
    if (!(s >= 0.0)) throw DomainError("mgf_derivative: s must be nonnegative");
    const double b0 = p.b0, m = p.m, om = p.omega;
    // b0 (b0 m)^m (1 + 2 b0 s)^(m-2) * num / [b0 (m + 2 b0 m s + s om)]^(m+1), in log form.
    const double num = 4.0 * b0 * b0 * m * s + m * om + 2.0 * b0 * (m + s * om);
    const double log_scale = std::log(b0) + m * std::log(b0 * m) +
                             (m - 2.0) * std::log1p(2.0 * b0 * s) -
                             (m + 1.0) * std::log(b0 * (m + 2.0 * b0 * m * s + s * om));
    return num * std::exp(log_scale);
}

double sample_power(const FadingParams& p, RngStream& rng) {
    const double los = p.omega > 0.0
                           ? std::gamma_distribution<double>(p.m, p.omega / p.m)(rng)
                           : 0.0;
    const double phase = 2.0 * std::numbers::pi * rng.uniform();
    std::normal_distribution<double> scatter(0.0, std::sqrt(p.b0));
    const double re = std::sqrt(los) * std::cos(phase) + scatter(rng);
    const double im = std::sqrt(los) * std::sin(phase) + scatter(rng);
    return re * re + im * im;
}

namespace {

// Relative truncation bound. M1 is decreasing, so the dropped tail is at most
// e1_tail_integral(U) / (1 - e1_tail_integral(U)) of the retained integral.
constexpr double capacity_tail_bound = 1e-13;

// integral_U^inf E1(u) du
double e1_tail_integral(double u) { return std::exp(-u) - u * exponential_e1(u); }

double capacity_nats(double snr, const FadingParams& p) {
    // C = integral_0^inf E1(s / snr) M1(s) ds with s = snr * e^y, which removes the
    // logarithmic singularity of E1 at the origin.
    double upper = 8.0;
    while (e1_tail_integral(upper) > capacity_tail_bound) upper *= 2.0;
    const double y_lo = -40.0 - std::max(0.0, std::log(snr));
    const double y_hi = std::log(upper);
    const auto integrand = [&](double y) {
        const double u = std::exp(y);
        return exponential_e1(u) * mgf_derivative(snr * u, p) * snr * u;
    };
    double error = 0.0;
    double l1 = 0.0;
    const double value = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(
        integrand, y_lo, y_hi, 20, 1e-13, &error, &l1);
    const double budget = 1e-9 * std::max(l1, 1e-300);
    if (!(error <= budget) || !std::isfinite(value))
        throw NumericalError("instantaneous_capacity: quadrature did not converge", error);
    return value;
}

} // namespace

double instantaneous_capacity(const LinkBudget& link, const FadingParams& p) {
    return capacity_nats(link.snr(), p) / std::numbers::ln2;
}

double instantaneous_capacity(double snr, const std::optional<FadingParams>& fading) {
    if (!(snr > 0.0)) throw DomainError("instantaneous_capacity: snr must be positive");
    if (!fading) return std::log1p(snr) / std::numbers::ln2;
    return capacity_nats(snr, *fading) / std::numbers::ln2;
}

CapacityCurve::CapacityCurve(std::optional<FadingParams> fading, double log_snr_min,
                             double log_snr_max, int nodes_per_unit)
    : fading_(std::move(fading)), x0_(log_snr_min), step_(1.0 / nodes_per_unit) {
    if (!(log_snr_max > log_snr_min) || nodes_per_unit < 1)
        throw DomainError("CapacityCurve: empty table range");
    if (!fading_) return;
    const auto n = static_cast<std::size_t>(std::ceil((log_snr_max - log_snr_min) / step_)) + 1;
    log_capacity_.resize(n);
    for (std::size_t i = 0; i < n; ++i)
        log_capacity_[i] =
            std::log(instantaneous_capacity(std::exp(x0_ + step_ * static_cast<double>(i)), fading_));
}

double CapacityCurve::operator()(double snr) const {
    if (!fading_) return std::log1p(snr) / std::numbers::ln2;
    const double pos = (std::log(snr) - x0_) / step_;
    const auto n = static_cast<double>(log_capacity_.size());
    if (!(pos >= 1.0 && pos <= n - 3.0)) return instantaneous_capacity(snr, fading_);
    const auto i = static_cast<std::size_t>(pos) - 1;  // nodes i .. i+3 bracket pos
    const double t = pos - static_cast<double>(i);     // in [1, 2)
    const double* f = &log_capacity_[i];
    // Cubic Lagrange through t = 0, 1, 2, 3.
    const double l0 = -(t - 1.0) * (t - 2.0) * (t - 3.0) / 6.0;
    const double l1 = t * (t - 2.0) * (t - 3.0) / 2.0;
    const double l2 = -t * (t - 1.0) * (t - 3.0) / 2.0;
    const double l3 = t * (t - 1.0) * (t - 2.0) / 6.0;
    return std::exp(l0 * f[0] + l1 * f[1] + l2 * f[2] + l3 * f[3]);
}

} // namespace leocap
