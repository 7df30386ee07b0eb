#pragma once
// Experiment scenarios in user-facing units and their key-value file format.

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "leocap/constellation.hpp"
#include "leocap/serving.hpp"

namespace leocap {

struct Scenario {
    std::string name = "custom";
    // [user]
    double lat_deg = 0.0;
    double lon_deg = 0.0;
    double psi_min_deg = 30.0;
    // [shell]
    double h_km = 550.0;
    double b_deg = 53.0;
    // [constellation]
    std::string model = "nbpp";  // "nbpp" or "grid"
    int n_sat = 3168;
    int planes = 144;
    int per_plane = 22;
    std::string phasing = "random";  // "random" or a Walker phasing factor
    // [fading]
    bool fading = true;
    double b0 = 0.126;
    double m = 10.1;
    double omega = 0.835;
    // [policy]
    double t_min_s = 0.0;
    double t_max_s = std::numeric_limits<double>::infinity();
    double dt_s = 1.0;
    // [link]
    double gamma_db = 120.0;
    // [mc]
    std::uint64_t seed = 1;
    std::size_t n_renewals = 1000;

    bool operator==(const Scenario&) const = default;

    GroundUser ground_user() const;
    OrbitShell orbit_shell() const;
    ServingPolicy policy() const;
    std::optional<FadingParams> fading_params() const;
    double gamma() const;
    ServingModel serving_model() const;
    /// NBPP parameters with `n_sat` satellites (the grid size when model = grid).
    ConstellationParams nbpp_params() const;
    ConstellationParams grid_params() const;
    std::vector<GridSatellite> grid_satellites() const;

    /// Throws ConfigError naming the offending field.
    void validate() const;
};

/// Named presets: "melbourne" (psi_min 30 deg) and "helsinki" (psi_min 10 deg).
Scenario preset(const std::string& name);
std::vector<std::string> preset_names();

/// Parses the key-value format; errors carry "line N" and the field name.
Scenario parse_scenario(std::istream& in, const std::string& source = "<scenario>");
Scenario load_scenario(const std::string& path);
void emit_scenario(std::ostream& out, const Scenario& s);

/// printf("%.17g").
std::string format_double(double x);

} // namespace leocap
