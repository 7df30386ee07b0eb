#pragma once

#include <cmath>

#include "leocap/geometry.hpp"

namespace fixtures {

inline constexpr double deg = leocap::constants::pi / 180.0;

inline leocap::GroundUser melbourne(double psi_min_deg = 30.0) {
    return {leocap::constants::earth_radius, 144.96 * deg, (90.0 + 37.81) * deg, psi_min_deg * deg};
}

inline leocap::GroundUser helsinki(double psi_min_deg = 10.0) {
    return {leocap::constants::earth_radius, 24.94 * deg, (90.0 - 60.17) * deg, psi_min_deg * deg};
}

inline leocap::OrbitShell starlink() { return {leocap::constants::earth_radius, 550e3, 53.0 * deg}; }

} // namespace fixtures
