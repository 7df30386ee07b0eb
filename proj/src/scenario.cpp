#include "leocap/scenario.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <set>

namespace leocap {

namespace {

constexpr double deg = constants::pi / 180.0;

} // namespace

GroundUser Scenario::ground_user() const {
    return {constants::earth_radius, lon_deg * deg, (90.0 - lat_deg) * deg, psi_min_deg * deg};
}

OrbitShell Scenario::orbit_shell() const { return {constants::earth_radius, h_km * 1e3, b_deg * deg}; }

ServingPolicy Scenario::policy() const { return {t_min_s, t_max_s, dt_s}; }

std::optional<FadingParams> Scenario::fading_params() const {
    if (!fading) return std::nullopt;
    return FadingParams{b0, m, omega};
}

double Scenario::gamma() const { return std::pow(10.0, gamma_db / 10.0); }

ServingModel Scenario::serving_model() const {
    return {ground_user(), orbit_shell(), policy(), gamma(), fading_params()};
}

ConstellationParams Scenario::nbpp_params() const {
    return ConstellationParams::nbpp(model == "grid" ? planes * per_plane : n_sat, orbit_shell());
}

ConstellationParams Scenario::grid_params() const {
    return ConstellationParams::grid(planes, per_plane, orbit_shell());
}

std::vector<GridSatellite> Scenario::grid_satellites() const {
    if (phasing == "random") {
        RngStream rng(seed, 0, 2);
        return grid_constellation(grid_params(), random_phase_offsets(planes, rng));
    }
    return grid_constellation(grid_params(), walker_phase_offsets(planes, per_plane, std::stoi(phasing)));
}

void Scenario::validate() const {
    const auto require = [](bool ok, const char* field, const char* what) {
        if (!ok) throw ConfigError(std::string("field '") + field + "': " + what);
    };
    require(std::isfinite(lat_deg) && lat_deg > -90.0 && lat_deg < 90.0, "user.lat_deg",
            "latitude must lie strictly inside (-90, 90)");
    require(std::isfinite(lon_deg), "user.lon_deg", "longitude must be finite");
    require(psi_min_deg >= 0.0 && psi_min_deg < 90.0, "user.psi_min_deg", "must lie in [0, 90)");
    require(h_km > 0.0 && std::isfinite(h_km), "shell.h_km", "altitude must be positive");
    require(b_deg > 0.0 && b_deg <= 90.0, "shell.b_deg", "inclination must lie in (0, 90]");
    require(model == "nbpp" || model == "grid", "constellation.model", "expected nbpp or grid");
    require(n_sat >= 1, "constellation.n_sat", "must be at least 1");
    require(planes >= 1, "constellation.planes", "must be at least 1");
    require(per_plane >= 1, "constellation.per_plane", "must be at least 1");
    if (phasing != "random") {
        int f = 0;
        const auto [p, ec] = std::from_chars(phasing.data(), phasing.data() + phasing.size(), f);
        require(ec == std::errc() && p == phasing.data() + phasing.size() && f >= 0,
                "constellation.phasing", "expected 'random' or a nonnegative integer");
    }
    if (fading) {
        require(b0 > 0.0 && std::isfinite(b0), "fading.b0", "must be positive");
        require(m > 0.0 && std::isfinite(m), "fading.m", "must be positive");
        require(omega >= 0.0 && std::isfinite(omega), "fading.omega", "must be nonnegative");
        require(omega + 2.0 * b0 > 0.0, "fading.omega", "mean fading power must be positive");
    }
    require(t_min_s >= 0.0 && std::isfinite(t_min_s), "policy.t_min_s", "must be finite and >= 0");
    require(t_max_s > 0.0, "policy.t_max_s", "must be positive (or inf)");
    require(t_min_s <= t_max_s, "policy.t_min_s", "exceeds policy.t_max_s");
    require(dt_s > 0.0 && std::isfinite(dt_s) && dt_s <= t_max_s, "policy.dt_s",
            "must be positive and no longer than t_max_s");
    require(std::isfinite(gamma_db), "link.gamma_db", "must be finite");
    require(n_renewals >= 1, "mc.n_renewals", "must be at least 1");
    // The cap must reach the orbital band or no satellite is ever visible.
    const GroundUser user = ground_user();
    const OrbitShell shell = orbit_shell();
    const double sigma1 = max_central_angle(user.psi_min, user.r, shell.R);
    const auto [lo, hi] = band_span(shell.b);
    require(user.phi_u - sigma1 < hi && user.phi_u + sigma1 > lo, "user.lat_deg",
            "visibility cap does not reach the orbital inclination band");
}

Scenario preset(const std::string& name) {
    Scenario s;
    s.name = name;
    if (name == "melbourne") {
        s.lat_deg = -37.81;
        s.lon_deg = 144.96;
        s.psi_min_deg = 30.0;
    } else if (name == "helsinki") {
        s.lat_deg = 60.17;
        s.lon_deg = 24.94;
        s.psi_min_deg = 10.0;
    } else {
        throw ConfigError("unknown preset '" + name + "' (expected melbourne or helsinki)");
    }
    return s;
}

std::vector<std::string> preset_names() { return {"melbourne", "helsinki"}; }

std::string format_double(double x) {
    if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

// ---------------------------------------------------------------------------

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

struct FieldError {
    std::string what;
};

double to_double(const std::string& v) {
    if (v == "inf" || v == "+inf") return std::numeric_limits<double>::infinity();
    double x = 0.0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw FieldError{"'" + v + "' is not a number"};
    return x;
}

template <typename Int>
Int to_integer(const std::string& v) {
    Int x = 0;
    const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
    if (ec != std::errc() || p != v.data() + v.size()) throw FieldError{"'" + v + "' is not an integer"};
    return x;
}

bool to_bool(const std::string& v) {
    if (v == "true" || v == "1" || v == "yes") return true;
    if (v == "false" || v == "0" || v == "no") return false;
    throw FieldError{"'" + v + "' is not a boolean"};
}

using Setter = std::function<void(Scenario&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"scenario.name", [](Scenario& s, const std::string& v) { s.name = v; }},
        {"user.lat_deg", [](Scenario& s, const std::string& v) { s.lat_deg = to_double(v); }},
        {"user.lon_deg", [](Scenario& s, const std::string& v) { s.lon_deg = to_double(v); }},
        {"user.psi_min_deg", [](Scenario& s, const std::string& v) { s.psi_min_deg = to_double(v); }},
        {"shell.h_km", [](Scenario& s, const std::string& v) { s.h_km = to_double(v); }},
        {"shell.b_deg", [](Scenario& s, const std::string& v) { s.b_deg = to_double(v); }},
        {"constellation.model", [](Scenario& s, const std::string& v) { s.model = v; }},
        {"constellation.n_sat", [](Scenario& s, const std::string& v) { s.n_sat = to_integer<int>(v); }},
        {"constellation.planes", [](Scenario& s, const std::string& v) { s.planes = to_integer<int>(v); }},
        {"constellation.per_plane",
         [](Scenario& s, const std::string& v) { s.per_plane = to_integer<int>(v); }},
        {"constellation.phasing", [](Scenario& s, const std::string& v) { s.phasing = v; }},
        {"fading.enabled", [](Scenario& s, const std::string& v) { s.fading = to_bool(v); }},
        {"fading.b0", [](Scenario& s, const std::string& v) { s.b0 = to_double(v); }},
        {"fading.m", [](Scenario& s, const std::string& v) { s.m = to_double(v); }},
        {"fading.omega", [](Scenario& s, const std::string& v) { s.omega = to_double(v); }},
        {"policy.t_min_s", [](Scenario& s, const std::string& v) { s.t_min_s = to_double(v); }},
        {"policy.t_max_s", [](Scenario& s, const std::string& v) { s.t_max_s = to_double(v); }},
        {"policy.dt_s", [](Scenario& s, const std::string& v) { s.dt_s = to_double(v); }},
        {"link.gamma_db", [](Scenario& s, const std::string& v) { s.gamma_db = to_double(v); }},
        {"mc.seed", [](Scenario& s, const std::string& v) { s.seed = to_integer<std::uint64_t>(v); }},
        {"mc.n_renewals",
         [](Scenario& s, const std::string& v) { s.n_renewals = to_integer<std::size_t>(v); }},
    };
    return table;
}

} // namespace

Scenario parse_scenario(std::istream& in, const std::string& source) {
    Scenario s;
    std::string section, line;
    std::set<std::string> seen;
    int lineno = 0;
    const auto fail = [&](const std::string& what) {
        throw ConfigError(source + ":" + std::to_string(lineno) + ": " + what);
    };
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find_first_of("#;");
        const std::string body = trim(hash == std::string::npos ? line : line.substr(0, hash));
        if (body.empty()) continue;
        if (body.front() == '[') {
            if (body.back() != ']') fail("unterminated section header");
            section = trim(body.substr(1, body.size() - 2));
            continue;
        }
        const auto eq = body.find('=');
        if (eq == std::string::npos) fail("expected 'key = value'");
        const std::string key = section + "." + trim(body.substr(0, eq));
        const std::string value = trim(body.substr(eq + 1));
        const auto it = setters().find(key);
        if (it == setters().end()) fail("unknown field '" + key + "'");
        if (!seen.insert(key).second) fail("duplicate field '" + key + "'");
        try {
            it->second(s, value);
        } catch (const FieldError& e) {
            fail("field '" + key + "': " + e.what);
        }
    }
    try {
        s.validate();
    } catch (const ConfigError& e) {
        throw ConfigError(source + ": " + e.what());
    }
    return s;
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open scenario file '" + path + "'");
    return parse_scenario(in, path);
}

void emit_scenario(std::ostream& out, const Scenario& s) {
    const auto d = format_double;
    out << "[scenario]\nname = " << s.name << "\n\n"
        << "[user]\nlat_deg = " << d(s.lat_deg) << "\nlon_deg = " << d(s.lon_deg)
        << "\npsi_min_deg = " << d(s.psi_min_deg) << "\n\n"
        << "[shell]\nh_km = " << d(s.h_km) << "\nb_deg = " << d(s.b_deg) << "\n\n"
        << "[constellation]\nmodel = " << s.model << "\nn_sat = " << s.n_sat
        << "\nplanes = " << s.planes << "\nper_plane = " << s.per_plane
        << "\nphasing = " << s.phasing << "\n\n"
        << "[fading]\nenabled = " << (s.fading ? "true" : "false") << "\nb0 = " << d(s.b0)
        << "\nm = " << d(s.m) << "\nomega = " << d(s.omega) << "\n\n"
        << "[policy]\nt_min_s = " << d(s.t_min_s) << "\nt_max_s = " << d(s.t_max_s)
        << "\ndt_s = " << d(s.dt_s) << "\n\n"
        << "[link]\ngamma_db = " << d(s.gamma_db) << "\n\n"
        << "[mc]\nseed = " << s.seed << "\nn_renewals = " << s.n_renewals << "\n";
}

} // namespace leocap
