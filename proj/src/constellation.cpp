#include "leocap/constellation.hpp"

#include <cmath>
#include <string>

namespace leocap {

ConstellationParams ConstellationParams::nbpp(int n_sat, const OrbitShell& shell) {
    if (n_sat < 1) throw ConfigError("constellation: n_sat must be at least 1");
    return {n_sat, shell, constants::two_pi, n_sat};
}

ConstellationParams ConstellationParams::grid(int planes, int per_plane, const OrbitShell& shell) {
    if (planes < 1 || per_plane < 1)
        throw ConfigError("constellation: grid needs at least one plane and one satellite");
    return {planes * per_plane, shell, constants::two_pi / planes, per_plane};
}

int ConstellationParams::planes() const {
    const double count = constants::two_pi / s_orb;
    const double rounded = std::round(count);
    if (rounded < 1 || std::abs(count - rounded) > 1e-9)
        throw ConfigError("constellation: plane spacing must divide 2pi");
    return static_cast<int>(rounded);
}

double sample_polar_angle(double u, double b) {
    return std::acos(clamp_unit(std::sin(b) * std::cos(constants::pi * u)));
}

double polar_angle_cdf(double phi, double b) {
    const auto [lo, hi] = band_span(b);
    if (phi <= lo) return 0.0;
    if (phi >= hi) return 1.0;
    return std::acos(clamp_unit(std::cos(phi) / std::sin(b))) / constants::pi;
}

bool in_cap(const VisibilityCap& cap, double theta, double phi) {
    return central_angle(cap.owner, theta, phi) <= cap.sigma1;
}

SatelliteInit sample_satellite(double b, RngStream& rng) {
    const double theta = constants::two_pi * rng.uniform();
    const double phi = sample_polar_angle(rng.uniform(), b);
    const int a = rng.uniform() < 0.5 ? -1 : +1;
    return {theta, phi, a};
}

VisibleSet sample_visible_set(const GroundUser& user, const ConstellationParams& params,
                              RngStream& rng, long max_empty) {
    const VisibilityCap cap = make_cap(user, params.shell.R);
    VisibleSet out;
    for (long attempt = 0; attempt < max_empty; ++attempt) {
        out.sats.clear();
        for (int i = 0; i < params.n_sat; ++i) {
            const SatelliteInit sat = sample_satellite(params.shell.b, rng);
            if (in_cap(cap, sat.theta0, sat.phi0)) out.sats.push_back(sat);
        }
        if (!out.empty()) return out;
    }
    throw ConfigError("sample_visible_set: " + std::to_string(max_empty) +
                      " consecutive realizations had no visible satellite");
}

std::vector<double> walker_phase_offsets(int planes, int per_plane, int phasing) {
    std::vector<double> offsets(static_cast<std::size_t>(planes));
    const double unit = constants::two_pi * phasing / (static_cast<double>(planes) * per_plane);
    for (int k = 0; k < planes; ++k) offsets[static_cast<std::size_t>(k)] = k * unit;
    return offsets;
}

std::vector<double> random_phase_offsets(int planes, RngStream& rng) {
    std::vector<double> offsets(static_cast<std::size_t>(planes));
    for (double& o : offsets) o = constants::two_pi * rng.uniform();
    return offsets;
}

SatelliteInit grid_position(const GridSatellite& sat, const OrbitShell& shell, double t) {
    const double u = sat.phase + shell.omega_sat * t;
    const double cu = std::cos(u), su = std::sin(u);
    const double cn = std::cos(sat.node), sn = std::sin(sat.node);
    const double cb = std::cos(shell.b), sb = std::sin(shell.b);
    const Vector3<double> p{cn * cu - sn * su * cb, sn * cu + cn * su * cb, su * sb};
    const auto [theta, phi] = to_spherical(p);
    return {theta, phi, cu >= 0.0 ? +1 : -1};
}

std::vector<GridSatellite> grid_constellation(const ConstellationParams& params,
                                              const std::vector<double>& phase_offsets) {
    const int planes = params.planes();
    if (!phase_offsets.empty() && phase_offsets.size() != static_cast<std::size_t>(planes))
        throw ConfigError("grid_constellation: need one phase offset per plane");
    std::vector<GridSatellite> out;
    out.reserve(static_cast<std::size_t>(planes) * params.n_orb);
    for (int k = 0; k < planes; ++k) {
        const double node = k * params.s_orb;
        const double offset = phase_offsets.empty() ? 0.0 : phase_offsets[static_cast<std::size_t>(k)];
        for (int j = 0; j < params.n_orb; ++j) {
            GridSatellite sat{{}, node, offset + constants::two_pi * j / params.n_orb};
            sat.init = grid_position(sat, params.shell, 0.0);
            out.push_back(sat);
        }
    }
    return out;
}

VisibleSet visible_snapshot(const std::vector<SatelliteInit>& positions, const GroundUser& user,
                            const VisibilityCap& cap) {
    VisibleSet out;
    for (const auto& p : positions)
        if (central_angle(user, p.theta0, p.phi0) <= cap.sigma1) out.sats.push_back(p);
    return out;
}

} // namespace leocap
