#pragma once
// Satellite positions: the binomial point process (NBPP) model and the
// deterministic uniform-grid circular constellation.

#include <cstddef>
#include <vector>

#include "leocap/geometry.hpp"
#include "leocap/rng.hpp"

namespace leocap {

struct ConstellationParams {
    int n_sat;
    OrbitShell shell;
    double s_orb;  // plane spacing, rad (grid only)
    int n_orb;     // satellites per plane (grid only)

    /// Point-process constellation; grid fields describe a single plane.
    static ConstellationParams nbpp(int n_sat, const OrbitShell& shell);
    /// Uniform grid of `planes` planes with `per_plane` satellites each.
    static ConstellationParams grid(int planes, int per_plane, const OrbitShell& shell);

    int planes() const;
};

struct VisibleSet {
    std::vector<SatelliteInit> sats;

    std::size_t n_vis() const { return sats.size(); }
    bool empty() const { return sats.empty(); }
};

/// Inverse CDF of the polar-angle density sin(phi) / (pi sqrt(sin^2 phi - cos^2 b)).
double sample_polar_angle(double u, double b);

/// CDF matching `sample_polar_angle`.
double polar_angle_cdf(double phi, double b);

bool in_cap(const VisibilityCap& cap, double theta, double phi);

/// One NBPP point: longitude, polar angle and direction mark, drawn in that order.
SatelliteInit sample_satellite(double b, RngStream& rng);

/// Draws NBPP realizations until at least one satellite is visible.
///
/// Throws ConfigError after `max_empty` consecutive empty realizations.
VisibleSet sample_visible_set(const GroundUser& user, const ConstellationParams& params,
                              RngStream& rng, long max_empty = 1'000'000);

struct GridSatellite {
    SatelliteInit init;  // position at epoch
    double node;         // longitude of the ascending node, rad
    double phase;        // argument of latitude at epoch, rad
};

/// Walker-style offsets: plane k is advanced by k * F * 2pi / n_sat.
std::vector<double> walker_phase_offsets(int planes, int per_plane, int phasing = 1);

/// Independent uniform in-plane phase for every plane.
std::vector<double> random_phase_offsets(int planes, RngStream& rng);

/// Deterministic grid; `phase_offsets` may be empty (all planes in phase).
std::vector<GridSatellite> grid_constellation(const ConstellationParams& params,
                                              const std::vector<double>& phase_offsets);

/// Position and direction mark of a grid satellite at time t, from its orbital elements.
SatelliteInit grid_position(const GridSatellite& sat, const OrbitShell& shell, double t);

/// Instantaneous visible subset of deterministic positions (may be empty).
VisibleSet visible_snapshot(const std::vector<SatelliteInit>& positions, const GroundUser& user,
                            const VisibilityCap& cap);

} // namespace leocap
