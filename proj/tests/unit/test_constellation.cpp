#include <doctest.h>

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "fixtures.hpp"
#include "leocap/constellation.hpp"

using namespace leocap;
using fixtures::deg;

namespace {

double polar_density(double phi, double b) {
    const double s = std::sin(phi), c = std::cos(b);
    return s / (constants::pi * std::sqrt(std::max(0.0, s * s - c * c)));
}

// Reference CDF by quadrature of the density after phi = lo + t^2, which
// removes the inverse-square-root singularity at the band edge. The radicand
// is written without cancellation: sin^2 phi - cos^2 b = 2 sin(b - d/2) sin(d/2) (cos(b - d) + cos b).
double reference_cdf(double phi, double b) {
    const double lo = constants::pi / 2 - b;
    if (phi <= lo) return 0.0;
    const auto integrand = [b, lo](double t) {
        const double d = t * t;
        const double radicand = 2 * std::sin(b - d / 2) * std::sin(d / 2) * (std::cos(b - d) + std::cos(b));
        if (t == 0.0) return 2.0 * std::sin(lo) / (constants::pi * std::sqrt(std::sin(b) * 2 * std::cos(b)));
        return 2 * t * std::sin(lo + d) / (constants::pi * std::sqrt(radicand));
    };
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(integrand, 0.0, std::sqrt(phi - lo), 15, 1e-13);
}

// P(satellite in cap) by quadrature of (L(phi) / 2pi) f(phi).
double cap_probability(const GroundUser& u, const OrbitShell& shell) {
    const VisibilityCap cap = make_cap(u, shell.R);
    const auto [blo, bhi] = band_span(shell.b);
    const double lo = std::max(u.phi_u - cap.sigma1, blo), hi = std::min(u.phi_u + cap.sigma1, bhi);
    boost::math::quadrature::tanh_sinh<double> q;
    return q.integrate(
        [&](double phi) {
            return cap_arc_length(phi, u, cap.sigma1) / constants::two_pi * polar_density(phi, shell.b);
        },
        lo, hi);
}

} // namespace

TEST_CASE("polar angle sampler edges") {
    const double b = 53 * deg;
    CHECK(sample_polar_angle(0.0, b) == doctest::Approx(constants::pi / 2 - b).epsilon(1e-14));
    CHECK(sample_polar_angle(0.5, b) == doctest::Approx(constants::pi / 2).epsilon(1e-14));
    CHECK(sample_polar_angle(1.0, b) == doctest::Approx(constants::pi / 2 + b).epsilon(1e-14));
    CHECK(polar_angle_cdf(0.1, b) == 0.0);
    CHECK(polar_angle_cdf(3.0, b) == 1.0);
    for (double phi : {0.7, 1.0, 1.5, 2.0, 2.4})
        CHECK(polar_angle_cdf(phi, b) == doctest::Approx(reference_cdf(phi, b)).epsilon(1e-9));
}

TEST_CASE("polar angle draws follow the density (Kolmogorov-Smirnov)") {
    const double b = 53 * deg;
    RngStream rng(2024);
    std::vector<double> draws(1'000'000);
    for (double& x : draws) {
        x = sample_satellite(b, rng).phi0;
        REQUIRE(x >= constants::pi / 2 - b);
        REQUIRE(x <= constants::pi / 2 + b);
    }
    std::sort(draws.begin(), draws.end());
    double ks = 0.0;
    const double lo = constants::pi / 2 - b, span = 2 * b;
    for (int k = 1; k < 400; ++k) {
        const double phi = lo + span * k / 400.0;
        const double empirical =
            static_cast<double>(std::upper_bound(draws.begin(), draws.end(), phi) - draws.begin()) / draws.size();
        ks = std::max(ks, std::abs(empirical - reference_cdf(phi, b)));
    }
    CHECK(ks < 0.002);
}

TEST_CASE("longitudes are uniform and marks balanced") {
    RngStream rng(77);
    constexpr int bins = 36, n = 1'000'000;
    std::array<int, bins> count{};
    long marks = 0;
    for (int i = 0; i < n; ++i) {
        const SatelliteInit s = sample_satellite(53 * deg, rng);
        REQUIRE(s.theta0 >= 0.0);
        REQUIRE(s.theta0 < constants::two_pi);
        ++count[static_cast<int>(s.theta0 / constants::two_pi * bins)];
        marks += s.a;
    }
    double chi2 = 0.0;
    const double expected = static_cast<double>(n) / bins;
    for (int c : count) chi2 += (c - expected) * (c - expected) / expected;
    CHECK(chi2 < 66.62);  // chi-square with 35 dof, p = 0.001
    CHECK(std::abs(static_cast<double>(marks) / n) < 3.0 / std::sqrt(double(n)));
}

TEST_CASE("visible set") {
    const OrbitShell shell = fixtures::starlink();
    const GroundUser user = fixtures::melbourne();
    const VisibilityCap cap = make_cap(user, shell.R);

    SUBCASE("members lie in the cap and the draw is reproducible") {
        const auto params = ConstellationParams::nbpp(1584, shell);
        RngStream a(9, 3), b(9, 3);
        const VisibleSet va = sample_visible_set(user, params, a);
        const VisibleSet vb = sample_visible_set(user, params, b);
        REQUIRE(va.n_vis() == vb.n_vis());
        for (std::size_t k = 0; k < va.n_vis(); ++k) {
            CHECK(va.sats[k].theta0 == vb.sats[k].theta0);
            CHECK(va.sats[k].phi0 == vb.sats[k].phi0);
            CHECK(va.sats[k].a == vb.sats[k].a);
            CHECK(central_angle(user, va.sats[k].theta0, va.sats[k].phi0) <= cap.sigma1);
        }
    }
    SUBCASE("mean visible count matches the cap probability") {
        const int n_sat = 1584, draws = 10'000;
        const auto params = ConstellationParams::nbpp(n_sat, shell);
        std::vector<double> counts(draws);
        for (int i = 0; i < draws; ++i) {
            RngStream rng(5, static_cast<std::uint64_t>(i));
            counts[i] = static_cast<double>(sample_visible_set(user, params, rng).n_vis());
        }
        double mean = 0.0, var = 0.0;
        for (double c : counts) mean += c / draws;
        for (double c : counts) var += (c - mean) * (c - mean) / (draws - 1);
        const double expected = n_sat * cap_probability(user, shell);
        // The chance of an empty realization is negligible here (mean count ~ 10).
        CHECK(std::abs(mean - expected) < 2.0 * std::sqrt(var / draws));
    }
    SUBCASE("single satellite with a cap covering the whole band") {
        const GroundUser equator(constants::earth_radius, 0.0, constants::pi / 2, 0.0);
        const OrbitShell far(constants::earth_radius, 1e9, 10 * deg);
        RngStream rng(1);
        const VisibleSet v = sample_visible_set(equator, ConstellationParams::nbpp(1, far), rng);
        CHECK(v.n_vis() == 1);
    }
    SUBCASE("unreachable cap is a configuration error") {
        const GroundUser polar(constants::earth_radius, 0.0, 1 * deg, 80 * deg);
        RngStream rng(1);
        CHECK_THROWS_AS(sample_visible_set(polar, ConstellationParams::nbpp(10, shell), rng, 100),
                        ConfigError);
    }
}

TEST_CASE("grid constellation") {
    const OrbitShell shell = fixtures::starlink();
    SUBCASE("counts and radius") {
        const auto params = ConstellationParams::grid(72, 22, shell);
        CHECK(params.n_sat == 1584);
        CHECK(params.n_sat == doctest::Approx(constants::two_pi * params.n_orb / params.s_orb));
        const auto grid = grid_constellation(params, walker_phase_offsets(72, 22));
        CHECK(grid.size() == 1584);
        for (const auto& g : grid) {
            const CircularTrack track(g.init, shell);
            CHECK(track.position(0.0).norm() == doctest::Approx(shell.R).epsilon(1e-9));
        }
    }
    SUBCASE("single satellite") {
        const auto params = ConstellationParams::grid(1, 1, shell);
        CHECK(grid_constellation(params, {}).size() == 1);
    }
    SUBCASE("spacing must divide the circle") {
        ConstellationParams bad = ConstellationParams::grid(72, 22, shell);
        bad.s_orb = 0.1;
        CHECK_THROWS_AS(grid_constellation(bad, {}), ConfigError);
        CHECK_THROWS_AS(grid_constellation(ConstellationParams::grid(4, 2, shell), {0.0, 1.0}), ConfigError);
    }
    SUBCASE("grid orbits coincide with the rotation-sequence propagation") {
        const auto grid = grid_constellation(ConstellationParams::grid(12, 5, shell), walker_phase_offsets(12, 5, 3));
        for (const auto& g : grid) {
            if (std::sin(g.init.phi0) < std::cos(shell.b) + 1e-9) continue;  // band edge: heading undefined
            const CircularTrack track(g.init, shell);
            for (double t : {10.0, 300.0, 2000.0}) {
                const SatelliteInit s = grid_position(g, shell, t);
                CHECK((unit_vector(s.theta0, s.phi0) - track.direction(t)).norm() < 1e-9);
            }
        }
    }
    SUBCASE("long-run polar-angle occupancy matches the point-process density") {
        const auto grid = grid_constellation(ConstellationParams::grid(72, 22, shell), walker_phase_offsets(72, 22));
        // Decile edges of the density from the reference CDF, by bisection.
        std::array<double, 11> edges{};
        edges[0] = 0.0;
        edges[10] = constants::pi;
        for (int k = 1; k < 10; ++k) {
            double lo = constants::pi / 2 - shell.b, hi = constants::pi / 2 + shell.b;
            for (int it = 0; it < 60; ++it) {
                const double mid = 0.5 * (lo + hi);
                (reference_cdf(mid, shell.b) < k / 10.0 ? lo : hi) = mid;
            }
            edges[k] = 0.5 * (lo + hi);
        }
        std::array<double, 10> count{};
        double total = 0.0;
        const int steps = 400;
        for (int i = 0; i < steps; ++i) {
            const double t = 10.0 * shell.T_sat * (i + 0.37) / steps;
            for (const auto& g : grid) {
                const double phi = grid_position(g, shell, t).phi0;
                const int bin = static_cast<int>(std::upper_bound(edges.begin(), edges.end(), phi) - edges.begin()) - 1;
                count[std::clamp(bin, 0, 9)] += 1.0;
                total += 1.0;
            }
        }
        for (double c : count) CHECK(c / total == doctest::Approx(0.1).epsilon(0.05));
    }
}

TEST_CASE("visible snapshot") {
    const OrbitShell shell = fixtures::starlink();
    const GroundUser user = fixtures::melbourne();
    const VisibilityCap cap = make_cap(user, shell.R);
    const SatelliteInit antipode{wrap_two_pi(user.theta_u + constants::pi), constants::pi - user.phi_u, 1};
    CHECK(visible_snapshot({antipode, antipode}, user, cap).empty());
    const SatelliteInit overhead{user.theta_u, user.phi_u, -1};
    CHECK(visible_snapshot({antipode, overhead}, user, cap).n_vis() == 1);

    const auto grid = grid_constellation(ConstellationParams::grid(72, 22, shell), walker_phase_offsets(72, 22));
    std::vector<SatelliteInit> positions;
    for (const auto& g : grid) positions.push_back(grid_position(g, shell, 1234.5));
    const VisibleSet v = visible_snapshot(positions, user, cap);
    std::size_t expected = 0;
    for (const auto& p : positions)
        expected += user.unit().dot(unit_vector(p.theta0, p.phi0)) >= std::cos(cap.sigma1);
    CHECK(v.n_vis() == expected);
}
