#pragma once
// Spherical geometry of the visibility cap and circular-orbit propagation.
//
// Conventions: theta is longitude in [0, 2pi), phi is the polar angle measured
// from the north pole, lengths are meters and times are seconds.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include <Eigen/Geometry>

#include "leocap/errors.hpp"

namespace leocap {

namespace constants {
inline constexpr double pi = std::numbers::pi;
inline constexpr double two_pi = 2.0 * std::numbers::pi;
inline constexpr double earth_radius = 6'371'000.0;   // m
inline constexpr double earth_mu = 3.986004418e14;    // m^3/s^2
} // namespace constants

template <typename Scalar> using Vector3 = Eigen::Matrix<Scalar, 3, 1>;
template <typename Scalar> using Matrix3 = Eigen::Matrix<Scalar, 3, 3>;

template <typename Scalar>
inline Scalar clamp_unit(Scalar x) {
    return std::clamp(x, Scalar(-1), Scalar(1));
}

/// Wraps an angle to [0, 2pi).
template <typename Scalar>
inline Scalar wrap_two_pi(Scalar x) {
    const Scalar two_pi = Scalar(constants::two_pi);
    x = std::fmod(x, two_pi);
    if (x < Scalar(0)) x += two_pi;
    return x >= two_pi ? Scalar(0) : x;
}

template <typename Scalar>
inline Vector3<Scalar> unit_vector(Scalar theta, Scalar phi) {
    const Scalar s = std::sin(phi);
    return {s * std::cos(theta), s * std::sin(theta), std::cos(phi)};
}

/// Spherical (theta, phi) of a nonzero Cartesian vector.
template <typename Scalar>
inline std::pair<Scalar, Scalar> to_spherical(const Vector3<Scalar>& p) {
    const Scalar theta = wrap_two_pi(std::atan2(p.y(), p.x()));
    const Scalar phi = std::acos(clamp_unit(p.z() / p.norm()));
    return {theta, phi};
}

template <typename Scalar>
struct GroundUserT {
    Scalar r;        // Earth radius, m
    Scalar theta_u;  // longitude, rad
    Scalar phi_u;    // polar angle, rad
    Scalar psi_min;  // minimum elevation angle, rad

    GroundUserT(Scalar r_, Scalar theta_u_, Scalar phi_u_, Scalar psi_min_)
        : r(r_), theta_u(wrap_two_pi(theta_u_)), phi_u(phi_u_), psi_min(psi_min_) {
        if (!(r > Scalar(0))) throw DomainError("GroundUser: radius must be positive");
        if (!(phi_u > Scalar(0) && phi_u < Scalar(constants::pi)))
            throw DomainError("GroundUser: polar angle must lie strictly inside (0, pi)");
        if (!(psi_min >= Scalar(0) && psi_min < Scalar(constants::pi / 2)))
            throw DomainError("GroundUser: minimum elevation must lie in [0, pi/2)");
    }

    Vector3<Scalar> unit() const { return unit_vector(theta_u, phi_u); }
};

/// Circular orbit shell with the speed of a Keplerian circular orbit.
template <typename Scalar>
struct OrbitShellT {
    Scalar h;          // altitude, m
    Scalar b;          // inclination, rad
    Scalar R;          // shell radius, m
    Scalar v_sat;      // m/s
    Scalar omega_sat;  // rad/s
    Scalar T_sat;      // s

    OrbitShellT(Scalar r, Scalar h_, Scalar b_, Scalar mu = Scalar(constants::earth_mu))
        : h(h_), b(b_), R(r + h_) {
        if (!(h > Scalar(0))) throw DomainError("OrbitShell: altitude must be positive");
        if (!(b > Scalar(0) && b <= Scalar(constants::pi / 2)))
            throw DomainError("OrbitShell: inclination must lie in (0, pi/2]");
        v_sat = std::sqrt(mu / R);
        omega_sat = v_sat / R;
        T_sat = Scalar(constants::two_pi) / omega_sat;
    }
};

template <typename Scalar>
struct SatelliteInitT {
    Scalar theta0;
    Scalar phi0;
    int a;  // +1 moving north, -1 moving south
};

template <typename Scalar>
struct VisibilityCapT {
    Scalar sigma1;
    GroundUserT<Scalar> owner;
};

/// Great-circle angle between the user and the sub-point (theta, phi).
template <typename Scalar>
inline Scalar central_angle(const GroundUserT<Scalar>& user, Scalar theta, Scalar phi) {
    const Scalar c = std::cos(user.phi_u) * std::cos(phi) +
                     std::sin(user.phi_u) * std::sin(phi) * std::cos(user.theta_u - theta);
    return std::acos(clamp_unit(c));
}

/// Half-angle of the cone of satellites seen above `psi_min`.
template <typename Scalar>
inline Scalar max_central_angle(Scalar psi_min, Scalar r, Scalar R) {
    return std::acos(clamp_unit(r / R * std::cos(psi_min))) - psi_min;
}

template <typename Scalar>
inline Scalar slant_range(const GroundUserT<Scalar>& user, Scalar R, Scalar sigma) {
    const Scalar r = user.r;
    return std::sqrt(std::max(Scalar(0), r * r + R * R - Scalar(2) * r * R * std::cos(sigma)));
}

template <typename Scalar>
inline VisibilityCapT<Scalar> make_cap(const GroundUserT<Scalar>& user, Scalar R) {
    if (!(R > user.r)) throw DomainError("visibility cap: shell radius must exceed Earth radius");
    return {max_central_angle(user.psi_min, user.r, R), user};
}

namespace detail {
inline constexpr double edge_tolerance = 1e-12;
}

/// Length (in longitude) of the latitude line at polar angle `phi` inside the cap.
template <typename Scalar>
inline Scalar cap_arc_length(Scalar phi, const GroundUserT<Scalar>& user, Scalar sigma1) {
    const Scalar tol = Scalar(detail::edge_tolerance);
    if (phi < user.phi_u - sigma1 - tol || phi > user.phi_u + sigma1 + tol)
        throw DomainError("cap_arc_length: polar angle outside the cap span");
    const Scalar s = std::sin(phi);
    if (s <= Scalar(0)) return Scalar(0);
    const Scalar arg = (std::cos(user.phi_u) / std::sin(user.phi_u) * std::cos(phi) -
                        std::cos(sigma1) / std::sin(user.phi_u)) / s;
    const Scalar L = Scalar(constants::pi) + Scalar(2) * std::asin(clamp_unit(arg));
    return std::clamp(L, Scalar(0), Scalar(constants::two_pi));
}

/// Longitude interval [theta_L, theta_U] of the cap at polar angle `phi`.
template <typename Scalar>
inline std::pair<Scalar, Scalar> cap_bounds(Scalar phi, const GroundUserT<Scalar>& user,
                                            Scalar sigma1) {
    const Scalar half = cap_arc_length(phi, user, sigma1) / Scalar(2);
    return {user.theta_u - half, user.theta_u + half};
}

/// Heading of the velocity relative to the latitude line at `phi`.
template <typename Scalar>
inline Scalar direction_angle(Scalar phi, Scalar b, int a) {
    const Scalar s = std::sin(phi);
    const Scalar cb = std::cos(b);
    if (s < cb - Scalar(detail::edge_tolerance))
        throw DomainError("direction_angle: polar angle outside the inclination band");
    return Scalar(a) * std::acos(clamp_unit(cb / s));
}

/// Polar-angle span of the inclination band, [pi/2 - b, pi/2 + b].
template <typename Scalar>
inline std::pair<Scalar, Scalar> band_span(Scalar b) {
    const Scalar half_pi = Scalar(constants::pi / 2);
    return {half_pi - b, half_pi + b};
}

/// Circular trajectory through an initial position.
///
/// The in-plane point (R cos wt, R sin wt, 0) is rotated about x by the
/// heading, clockwise about y by the initial latitude, and about z by the
/// initial longitude. The composite rotation is formed once.
template <typename Scalar>
class CircularTrackT {
public:
    CircularTrackT(const SatelliteInitT<Scalar>& init, const OrbitShellT<Scalar>& shell)
        : radius_(shell.R), omega_(shell.omega_sat) {
        using Axis = Eigen::AngleAxis<Scalar>;
        const Scalar beta = direction_angle(init.phi0, shell.b, init.a);
        const Scalar latitude = Scalar(constants::pi / 2) - init.phi0;
        rotation_ = (Axis(init.theta0, Vector3<Scalar>::UnitZ()) *
                     Axis(-latitude, Vector3<Scalar>::UnitY()) *
                     Axis(beta, Vector3<Scalar>::UnitX()))
                        .toRotationMatrix();
    }

    /// Unit direction of the satellite at time t.
    Vector3<Scalar> direction(Scalar t) const {
        const Scalar w = omega_ * t;
        return rotation_.col(0) * std::cos(w) + rotation_.col(1) * std::sin(w);
    }

    Vector3<Scalar> position(Scalar t) const { return radius_ * direction(t); }

    std::pair<Scalar, Scalar> spherical(Scalar t) const { return to_spherical(direction(t)); }

    const Matrix3<Scalar>& rotation() const { return rotation_; }

private:
    Scalar radius_;
    Scalar omega_;
    Matrix3<Scalar> rotation_;
};

template <typename Scalar>
inline std::pair<Scalar, Scalar> propagate(const SatelliteInitT<Scalar>& init,
                                           const OrbitShellT<Scalar>& shell, Scalar t) {
    return CircularTrackT<Scalar>(init, shell).spherical(t);
}

/// Time until the satellite leaves the cap.
///
/// Marches over [0, T_sat/2] in steps of T_sat/720 to bracket the exit and
/// bisects the bracket down to `tolerance` seconds.
template <typename Scalar>
Scalar visibility_time(const SatelliteInitT<Scalar>& init, const OrbitShellT<Scalar>& shell,
                       const VisibilityCapT<Scalar>& cap, Scalar tolerance = Scalar(1e-3)) {
    const CircularTrackT<Scalar> track(init, shell);
    const auto excess = [&](Scalar t) {
        const auto [theta, phi] = track.spherical(t);
        return central_angle(cap.owner, theta, phi) - cap.sigma1;
    };
    if (excess(Scalar(0)) > Scalar(1e-9))
        throw DomainError("visibility_time: satellite starts outside the visibility cap");

    const Scalar horizon = shell.T_sat / Scalar(2);
    const Scalar step = shell.T_sat / Scalar(720);
    Scalar lo = 0;
    for (int k = 1; k <= 360; ++k) {
        const Scalar hi = std::min(horizon, step * Scalar(k));
        if (excess(hi) > Scalar(0)) {
            Scalar upper = hi;
            while (upper - lo > tolerance) {
                const Scalar mid = (lo + upper) / Scalar(2);
                (excess(mid) > Scalar(0) ? upper : lo) = mid;
            }
            return (lo + upper) / Scalar(2);
        }
        lo = hi;
    }
    throw RootNotFoundError("visibility_time: no exit from the cap within half a period",
                            double(excess(horizon)));
}

using GroundUser = GroundUserT<double>;
using OrbitShell = OrbitShellT<double>;
using SatelliteInit = SatelliteInitT<double>;
using VisibilityCap = VisibilityCapT<double>;
using CircularTrack = CircularTrackT<double>;

} // namespace leocap
