#include "leocap/cli.hpp"

#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "leocap/estimator.hpp"
#include "leocap/scenario.hpp"

namespace leocap {

namespace {

using nlohmann::json;

struct Common {
    std::string scenario_file;
    std::string preset_name;
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> renewals;
    std::optional<double> fixed_serving;
    std::string out_path;

    Scenario scenario() const {
        Scenario s = scenario_file.empty() ? preset(preset_name.empty() ? "melbourne" : preset_name)
                                           : load_scenario(scenario_file);
        if (seed) s.seed = *seed;
        if (renewals) s.n_renewals = *renewals;
        if (fixed_serving) s.t_min_s = s.t_max_s = *fixed_serving;
        s.validate();
        return s;
    }
};

void add_common(CLI::App* sub, Common& c) {
    auto* file = sub->add_option("--scenario", c.scenario_file, "Scenario file");
    auto* pre = sub->add_option("--preset", c.preset_name, "Named scenario")
                    ->check(CLI::IsMember(preset_names()));
    file->excludes(pre);
    sub->add_option("--seed", c.seed, "Random seed");
    sub->add_option("--renewals", c.renewals, "Monte Carlo renewals")->check(CLI::PositiveNumber);
    sub->add_option("--fixed-serving", c.fixed_serving, "Fixed serving time T_min = T_max (s)")
        ->check(CLI::PositiveNumber);
    sub->add_option("--out", c.out_path, "Output file (default: standard output)");
}

/// Writes to `--out` when set, else to the stream.
void deliver(const Common& c, std::ostream& out, const std::string& text) {
    if (c.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(c.out_path, std::ios::binary);
    if (!file) throw ConfigError("cannot open output file '" + c.out_path + "'");
    file << text;
}

std::vector<StrategyKind> parse_strategies(const std::vector<std::string>& names) {
    if (names.empty()) throw ConfigError("--strategies: empty strategy list");
    std::vector<StrategyKind> out;
    for (const std::string& n : names) out.push_back(StrategyKind::parse(n));
    return out;
}

std::string csv_row(std::initializer_list<std::string> cells) {
    std::string row;
    for (const std::string& c : cells) {
        if (!row.empty()) row += ',';
        row += c;
    }
    return row + '\n';
}

// ---------------------------------------------------------------------------

struct HeatmapArgs {
    int direction = 1;
    int grid = 64;
    std::optional<int> grid_phi;
};

std::string heatmap(const Common& c, const HeatmapArgs& a) {
    if (a.direction != 1 && a.direction != -1) throw ConfigError("--direction must be 1 or -1");
    const int n_phi = a.grid_phi.value_or(a.grid);
    if (a.grid < 1 || n_phi < 1) throw ConfigError("--grid must be positive");
    const Scenario s = c.scenario();
    const auto field = serving_capacity_field(s.serving_model(), a.direction, a.grid, n_phi);
    std::size_t best = 0;
    for (std::size_t k = 1; k < field.size(); ++k)
        if (field[k].ratio > field[best].ratio) best = k;
    std::string text = "theta,phi,serving_capacity,argmax\n";
    for (std::size_t k = 0; k < field.size(); ++k)
        text += csv_row({format_double(field[k].theta), format_double(field[k].phi),
                         format_double(field[k].ratio), k == best ? "1" : "0"});
    return text;
}

struct SweepArgs {
    std::vector<double> points;
    std::vector<std::string> strategies{"rand", "msc0", "msc", "opt"};
    bool bounds = false;
    int bound_grid = 64;
    double time_step = 0.25;
};

constexpr const char* sweep_header = "experiment,strategy,variable,value,capacity,std_error,n_renewals,extra\n";

std::string sweep_point(const std::string& experiment, const std::string& variable, double value,
                        const ServingModel& model, const Scenario& s, const SweepArgs& a,
                        const std::vector<StrategyKind>& kinds) {
    const EventBatch batch = generate_events(model, s.nbpp_params(), s.n_renewals, s.seed);
    const std::string v = format_double(value);
    std::string text;
    for (const StrategyKind& k : kinds) {
        CapacityEstimate e;
        std::string extra;
        if (k.rule() == StrategyKind::Rule::Opt) {
            const OptimalEstimate opt = optimal_capacity(batch);
            e = opt.estimate;
            extra = "iterations=" + std::to_string(opt.trace.iterations);
        } else {
            e = estimate(k, batch);
        }
        text += csv_row({experiment, k.name(), variable, v, format_double(e.value),
                         format_double(e.std_error), std::to_string(e.n_renewals), extra});
    }
    if (a.bounds) {
        const UpperBound ub = upper_bound(model, a.bound_grid);
        text += csv_row({experiment, "upper_bound", variable, v, format_double(ub.value), "0", "0",
                         "a=" + std::to_string(ub.a)});
        const RandQuadrature q = rand_capacity_quadrature(model, a.time_step);
        text += csv_row({experiment, "rand_quadrature", variable, v, format_double(q.value), "0",
                         "0", ""});
    }
    return text;
}

std::string sweep_snr(const Common& c, SweepArgs a) {
    if (a.points.empty()) a.points = {100, 105, 110, 115, 120, 125, 130, 135, 140};
    const auto kinds = parse_strategies(a.strategies);
    const Scenario s = c.scenario();
    const ServingModel base = s.serving_model();
    std::string text = sweep_header;
    for (double db : a.points)
        text += sweep_point("sweep-snr", "gamma_db", db, base.with_gamma(std::pow(10.0, db / 10.0)),
                            s, a, kinds);
    return text;
}

std::string sweep_serving(const Common& c, SweepArgs a) {
    if (a.points.empty()) a.points = {1, 5, 10, 15, 20, 30, 45, 60};
    const auto kinds = parse_strategies(a.strategies);
    const Scenario s = c.scenario();
    const ServingModel base = s.serving_model();
    std::string text = sweep_header;
    for (double t : a.points) {
        if (!(t >= s.dt_s)) throw ConfigError("--points: serving times must be at least one frame");
        text += sweep_point("sweep-serving", "t_serv_s", t,
                            base.with_policy(ServingPolicy::fixed(t, s.dt_s)), s, a, kinds);
    }
    return text;
}

json scenario_json(const Scenario& s) {
    std::ostringstream cfg;
    emit_scenario(cfg, s);
    return {{"name", s.name}, {"config", cfg.str()}};
}

std::string bounds(const Common& c, int grid, double time_step) {
    const Scenario s = c.scenario();
    const ServingModel model = s.serving_model();
    const UpperBound ub = upper_bound(model, grid);
    const RandQuadrature q = rand_capacity_quadrature(model, time_step);
    const json j = {
        {"scenario", scenario_json(s)},
        {"upper_bound", {{"value", ub.value}, {"theta", ub.theta}, {"phi", ub.phi}, {"a", ub.a},
                         {"grid_resolution", grid}}},
        {"rand_quadrature", {{"value", q.value}, {"mean_capacity", q.mean_capacity},
                             {"mean_serving_time", q.mean_time}, {"time_step", time_step}}},
    };
    return j.dump(2) + "\n";
}

std::vector<FractionalEvent> read_events(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open events file '" + path + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    if (!j.is_array() || j.empty()) throw ConfigError(path + ": expected a nonempty array of events");
    std::vector<FractionalEvent> events;
    for (std::size_t n = 0; n < j.size(); ++n) {
        const json& ev = j[n];
        if (!ev.is_array() || ev.empty())
            throw ConfigError(path + ": event " + std::to_string(n) + " must be a nonempty array");
        FractionalEvent fe;
        for (const json& k : ev) {
            if (!k.is_array() || k.size() != 2 || !k[0].is_number() || !k[1].is_number())
                throw ConfigError(path + ": event " + std::to_string(n) +
                                  ": candidates must be [capacity, frames] pairs");
            const double cap = k[0].get<double>(), frames = k[1].get<double>();
            if (!(frames > 0.0) || !(cap >= 0.0))
                throw ConfigError(path + ": event " + std::to_string(n) +
                                  ": need capacity >= 0 and frames > 0");
            fe.push_back({cap, frames});
        }
        events.push_back(std::move(fe));
    }
    return events;
}

struct DinkelbachArgs {
    std::string events_file;
    std::optional<double> epsilon;
    double c0 = 0.0;
    int max_iterations = 100;
};

json trace_json(const DinkelbachTrace& t, double epsilon, std::size_t n_events, double seconds) {
    json it = json::array();
    for (const auto& [c, q] : t.iterates) it.push_back({c, q});
    return {{"iterates", it},         {"converged", t.converged}, {"iterations", t.iterations},
            {"c_star", t.c_star()},   {"epsilon", epsilon},       {"n_events", n_events},
            {"wall_time_s", seconds}};
}

int dinkelbach(const Common& c, const DinkelbachArgs& a, std::ostream& out, std::ostream& err) {
    const auto start = std::chrono::steady_clock::now();
    std::vector<FractionalEvent> events;
    if (!a.events_file.empty()) {
        events = read_events(a.events_file);
    } else {
        const Scenario s = c.scenario();
        events = fractional_events(generate_events(s.serving_model(), s.nbpp_params(), s.n_renewals, s.seed));
    }
    const double eps = a.epsilon.value_or(default_epsilon(events));
    if (!(eps >= 0.0)) throw ConfigError("--epsilon must be nonnegative");
    const auto seconds = [&] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    };
    try {
        const DinkelbachTrace t = dinkelbach_estimate(events, a.c0, eps, a.max_iterations);
        deliver(c, out, trace_json(t, eps, events.size(), seconds()).dump(2) + "\n");
        return exit_code::ok;
    } catch (const DinkelbachError& e) {
        deliver(c, out, trace_json(e.trace(), eps, events.size(), seconds()).dump(2) + "\n");
        err << "error: " << e.what() << "\n";
        return exit_code::numerical;
    }
}

int selftest(std::ostream& out) {
    int failures = 0;
    const auto check = [&](const std::string& name, bool ok) {
        out << (ok ? "ok   " : "FAIL ") << name << "\n";
        failures += !ok;
    };
    const FadingParams fading = average_shadowing();
    check("mgf_derivative(0) equals mean power",
          std::abs(mgf_derivative(0.0, fading) - fading.mean_power()) < 1e-12);
    check("Ei(-1)", std::abs(exponential_integral(-1.0) + 0.21938393439552026) < 1e-14);
    check("awgn capacity at snr 1", std::abs(instantaneous_capacity(1.0, std::nullopt) - 1.0) < 1e-15);

    const std::vector<FractionalEvent> events = {{{10, 5}, {9, 3}}, {{6, 2}}, {{4, 1}, {1, 2}, {7, 4}}};
    check("q_function example", std::abs(q_function(1.0, std::vector<FractionalEvent>(events.begin(), events.begin() + 2)) - 5.0) < 1e-12);
    const double brute = brute_force_optimal(events).c_star;
    const double dink = dinkelbach_estimate(events, 0.0, 1e-12).c_star();
    check("dinkelbach matches exhaustive search", std::abs(brute - dink) < 1e-12);

    const Scenario s = preset("melbourne");
    const GroundUser user = s.ground_user();
    const OrbitShell shell = s.orbit_shell();
    const VisibilityCap cap = make_cap(user, shell.R);
    const SatelliteInit sat{user.theta_u, user.phi_u, 1};
    const double t_vis = visibility_time(sat, shell, cap);
    const auto [theta, phi] = propagate(sat, shell, t_vis);
    check("visibility time lands on the cap edge",
          std::abs(central_angle(user, theta, phi) - cap.sigma1) < 1e-6);
    return failures == 0 ? exit_code::ok : exit_code::numerical;
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Persistent capacity of LEO mega-constellation channels", "leocap"};
    app.require_subcommand(1);

    Common common;
    HeatmapArgs heat;
    SweepArgs sweep;
    DinkelbachArgs dink;
    int bound_grid = 64;
    double time_step = 0.25;

    auto* cmd_heat = app.add_subcommand("heatmap", "Serving-capacity field C/N over the visibility cap");
    add_common(cmd_heat, common);
    cmd_heat->add_option("--direction", heat.direction, "Direction mark (+1 ascending, -1 descending)");
    cmd_heat->add_option("--grid", heat.grid, "Cells per axis (longitude axis if --grid-phi is set)");
    cmd_heat->add_option("--grid-phi", heat.grid_phi, "Cells along the polar angle");

    const auto add_sweep = [&](const char* name, const char* help, const char* points_help) {
        auto* cmd = app.add_subcommand(name, help);
        add_common(cmd, common);
        cmd->add_option("--points", sweep.points, points_help)->delimiter(',');
        cmd->add_option("--strategies", sweep.strategies, "Comma-separated: rand,msc0,msc,opt")
            ->delimiter(',');
        cmd->add_flag("--bounds", sweep.bounds, "Add upper-bound and rand-quadrature rows");
        cmd->add_option("--bound-grid", sweep.bound_grid, "Upper-bound grid resolution");
        cmd->add_option("--time-step", sweep.time_step, "Quadrature time step (s)");
        return cmd;
    };
    auto* cmd_snr = add_sweep("sweep-snr", "Persistent capacity over transmit SNR", "SNR values in dB");
    auto* cmd_serv = add_sweep("sweep-serving", "Persistent capacity over fixed serving times",
                               "Serving times in seconds");

    auto* cmd_bounds = app.add_subcommand("bounds", "Upper bound and random-handover lower bound");
    add_common(cmd_bounds, common);
    cmd_bounds->add_option("--grid", bound_grid, "Upper-bound grid resolution (>= 32)");
    cmd_bounds->add_option("--time-step", time_step, "Quadrature time step (s)");

    auto* cmd_dink = app.add_subcommand("dinkelbach", "Optimal persistent capacity and its trace");
    add_common(cmd_dink, common);
    cmd_dink->add_option("--events", dink.events_file, "JSON events [[[C, N], ...], ...]");
    cmd_dink->add_option("--epsilon", dink.epsilon, "Stopping tolerance on q(c)");
    cmd_dink->add_option("--c0", dink.c0, "Initial guess");
    cmd_dink->add_option("--max-iterations", dink.max_iterations, "Iteration cap");

    auto* cmd_self = app.add_subcommand("selftest", "Quick numerical self-checks");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e, out, err);
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return exit_code::config;
    }

    try {
        if (cmd_heat->parsed()) deliver(common, out, heatmap(common, heat));
        else if (cmd_snr->parsed()) deliver(common, out, sweep_snr(common, sweep));
        else if (cmd_serv->parsed()) deliver(common, out, sweep_serving(common, sweep));
        else if (cmd_bounds->parsed()) deliver(common, out, bounds(common, bound_grid, time_step));
        else if (cmd_dink->parsed()) return dinkelbach(common, dink, out, err);
        else if (cmd_self->parsed()) return selftest(out);
        return exit_code::ok;
    } catch (const NumericalError& e) {
        err << "error: " << e.what() << " (residual " << format_double(e.residual()) << ")\n";
        return exit_code::numerical;
    } catch (const std::exception& e) {
        // Configuration, domain and argument errors.
        err << "error: " << e.what() << "\n";
        return exit_code::config;
    }
}

} // namespace leocap
