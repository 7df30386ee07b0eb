#include "leocap/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <Eigen/Eigenvalues>
#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "leocap/parallel.hpp"

namespace leocap {

CapacityEstimate ratio_estimate(std::span<const double> capacity, std::span<const double> frames) {
    if (capacity.size() != frames.size() || capacity.empty())
        throw std::invalid_argument("ratio_estimate: need equally sized, nonempty samples");
    const std::size_t n = capacity.size();
    const double sum_c = pairwise_sum(capacity.begin(), capacity.end());
    const double sum_n = pairwise_sum(frames.begin(), frames.end());
    if (!(sum_n > 0.0)) throw std::invalid_argument("ratio_estimate: total frames must be positive");
    const double ratio = sum_c / sum_n;

    double se = 0.0;
    if (n > 1) {
        std::vector<double> sq(n);
        for (std::size_t i = 0; i < n; ++i) {
            const double d = capacity[i] - ratio * frames[i];
            sq[i] = d * d;
        }
        const double mean_n = sum_n / static_cast<double>(n);
        const double var = pairwise_sum(sq.begin(), sq.end()) / (static_cast<double>(n) * (n - 1));
        se = std::sqrt(var) / mean_n;
    }
    return {ratio, se, n};
}

// ---------------------------------------------------------------------------

EventBatch generate_events(const ServingModel& model, const ConstellationParams& params,
                           std::size_t n_renewals, std::uint64_t seed) {
    if (n_renewals < 1) throw DomainError("generate_events: need at least one renewal");
    EventBatch batch{seed, std::vector<Event>(n_renewals)};
    parallel_for(n_renewals, [&](std::size_t i) {
        RngStream rng(seed, i, 0);
        Event& ev = batch.events[i];
        ev.visible = sample_visible_set(model.user(), params, rng);
        ev.records.reserve(ev.visible.n_vis());
        for (const SatelliteInit& sat : ev.visible.sats)
            ev.records.push_back(serving_capacity(sat, model));
    });
    return batch;
}

std::vector<std::size_t> selections(const StrategyKind& kind, const EventBatch& batch) {
    std::vector<std::size_t> out(batch.events.size());
    for (std::size_t i = 0; i < out.size(); ++i) {
        RngStream rng(batch.seed, i, 1);
        const Event& ev = batch.events[i];
        out[i] = decide(kind, ev.visible, ev.records, rng);
    }
    return out;
}

namespace {

CapacityEstimate estimate_selection(const EventBatch& batch, std::span<const std::size_t> sel) {
    const std::size_t n = batch.events.size();
    if (sel.size() != n) throw std::invalid_argument("selection not aligned with the batch");
    std::vector<double> c(n), f(n);
    for (std::size_t i = 0; i < n; ++i) {
        const ServeRecord& r = batch.events[i].records.at(sel[i]);
        c[i] = r.capacity_sum;
        f[i] = r.frames;
    }
    return ratio_estimate(c, f);
}

} // namespace

CapacityEstimate estimate(const StrategyKind& kind, const EventBatch& batch) {
    return estimate_selection(batch, selections(kind, batch));
}

CapacityEstimate reevaluate(const EventBatch& batch, std::span<const std::size_t> selection,
                            const ServingModel& model) {
    const std::size_t n = batch.events.size();
    if (selection.size() != n) throw std::invalid_argument("reevaluate: selection not aligned");
    std::vector<double> c(n), f(n);
    const double dt = model.policy().dt;
    parallel_for(n, [&](std::size_t i) {
        const ServeRecord& r = batch.events[i].records.at(selection[i]);
        const CircularTrack track(r.sat, model.shell());
        const int lit = std::min(r.frames, visible_frames(r.visibility_time, dt));
        c[i] = model.segment_capacity(track, 0, lit);
        f[i] = r.frames;
    });
    return ratio_estimate(c, f);
}

CapacityEstimate persistent_capacity_mc(const StrategyKind& kind, const ServingModel& model,
                                        const ConstellationParams& params,
                                        std::size_t n_renewals, std::uint64_t seed) {
    return estimate(kind, generate_events(model, params, n_renewals, seed));
}

CapacityEstimate nonpersistent_capacity(const StrategyKind& kind, const ServingModel& model,
                                        const ConstellationParams& params, std::size_t n_samples,
                                        std::uint64_t seed) {
    const ServingModel single = model.with_policy(ServingPolicy::one_frame(model.policy().dt));
    const EventBatch batch = generate_events(single, params, n_samples, seed);
    const std::vector<std::size_t> sel = selections(kind, batch);
    std::vector<double> c(sel.size()), f(sel.size(), 1.0);
    for (std::size_t i = 0; i < sel.size(); ++i) c[i] = batch.events[i].records[sel[i]].initial_capacity;
    return ratio_estimate(c, f);
}

// ---------------------------------------------------------------------------

namespace {

/// The cap restricted to the inclination band, parameterized by (v, w) in
/// [0, 1]^2: v runs over polar angle, w across the longitude interval.
struct CapChart {
    const ServingModel& model;
    double phi_lo;
    double phi_hi;

    explicit CapChart(const ServingModel& m) : model(m) {
        const VisibilityCap& cap = m.cap();
        const auto [band_lo, band_hi] = band_span(m.shell().b);
        phi_lo = std::max(cap.owner.phi_u - cap.sigma1, band_lo);
        phi_hi = std::min(cap.owner.phi_u + cap.sigma1, band_hi);
        if (!(phi_hi > phi_lo))
            throw ConfigError("visibility cap does not intersect the orbital inclination band");
    }

    double phi(double v) const { return phi_lo + v * (phi_hi - phi_lo); }

    std::pair<double, double> point(double v, double w) const {
        const double p = phi(v);
        const auto [lo, hi] = cap_bounds(p, model.cap().owner, model.cap().sigma1);
        return {wrap_two_pi(lo + w * (hi - lo)), p};
    }

    double ratio(double v, double w, int a) const {
        const auto [theta, p] = point(v, w);
        return serving_capacity(SatelliteInit{theta, p, a}, model).ratio();
    }
};

} // namespace

std::vector<FieldPoint> serving_capacity_field(const ServingModel& model, int a, int n_theta,
                                               int n_phi) {
    if (n_theta < 1 || n_phi < 1) throw ConfigError("heat map grid must have at least one cell per axis");
    if (a != 1 && a != -1) throw DomainError("direction mark must be +1 or -1");
    const CapChart chart(model);
    std::vector<FieldPoint> out(static_cast<std::size_t>(n_theta) * n_phi);
    parallel_for(out.size(), [&](std::size_t k) {
        const int i = static_cast<int>(k / n_theta), j = static_cast<int>(k % n_theta);
        const double v = (i + 0.5) / n_phi, w = (j + 0.5) / n_theta;
        const auto [theta, phi] = chart.point(v, w);
        out[k] = {theta, phi, chart.ratio(v, w, a)};
    });
    return out;
}

UpperBound upper_bound(const ServingModel& model, int grid_resolution) {
    if (grid_resolution < 32) throw DomainError("upper_bound: grid resolution must be at least 32");
    const CapChart chart(model);
    const int n = grid_resolution;
    const double h = 1.0 / n;

    struct Best {
        double value = -1.0, v = 0.5, w = 0.5;
        int a = 1;
    };
    std::vector<Best> cells(2 * static_cast<std::size_t>(n) * n);
    parallel_for(cells.size(), [&](std::size_t k) {
        const int a = k < cells.size() / 2 ? 1 : -1;
        const std::size_t r = k % (cells.size() / 2);
        const double v = (static_cast<double>(r / n) + 0.5) * h;
        const double w = (static_cast<double>(r % n) + 0.5) * h;
        cells[k] = {chart.ratio(v, w, a), v, w, a};
    });
    Best best = cells[0];
    for (const Best& c : cells)
        if (c.value > best.value) best = c;

    // Coordinate refinements inside the neighbouring cells.
    constexpr double edge = 1e-9;
    const int bits = 30;
    const auto refine = [&](bool along_v) {
        const double centre = along_v ? best.v : best.w;
        const double lo = std::max(edge, centre - h), hi = std::min(1.0 - edge, centre + h);
        const auto f = [&](double x) {
            return -(along_v ? chart.ratio(x, best.w, best.a) : chart.ratio(best.v, x, best.a));
        };
        const auto [x, fx] = boost::math::tools::brent_find_minima(f, lo, hi, bits);
        if (-fx > best.value) {
            best.value = -fx;
            (along_v ? best.v : best.w) = x;
        }
    };
    refine(true);
    refine(false);

    const auto [theta, phi] = chart.point(best.v, best.w);
    return {best.value, theta, phi, best.a};
}

// ---------------------------------------------------------------------------

std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order) {
    if (order < 1) throw DomainError("gauss_legendre: order must be positive");
    Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(order, order);
    for (int k = 1; k < order; ++k) {
        const double beta = k / std::sqrt(4.0 * k * k - 1.0);
        jacobi(k, k - 1) = jacobi(k - 1, k) = beta;
    }
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(jacobi);
    std::vector<double> x(order), w(order);
    for (int k = 0; k < order; ++k) {
        x[k] = eig.eigenvalues()(k);
        const double v0 = eig.eigenvectors()(0, k);
        w[k] = 2.0 * v0 * v0;
    }
    return {x, w};
}

namespace {

/// Composite Gauss-Legendre rule on [0, 1] after the map x = (1 - cos(pi t)) / 2.
std::vector<std::pair<double, double>> cosine_rule(int panels, int order) {
    const auto [x, w] = gauss_legendre(order);
    std::vector<std::pair<double, double>> out;
    out.reserve(static_cast<std::size_t>(panels) * order);
    for (int p = 0; p < panels; ++p) {
        const double a = static_cast<double>(p) / panels, half = 0.5 / panels;
        for (int k = 0; k < order; ++k) {
            const double t = a + half * (x[k] + 1.0);
            const double node = 0.5 * (1.0 - std::cos(constants::pi * t));
            const double jac = 0.5 * constants::pi * std::sin(constants::pi * t);
            out.emplace_back(node, w[k] * half * jac);
        }
    }
    return out;
}

/// Integral of frame capacity along a track over [0, t_end], trapezoid rule.
double track_capacity(const ServingModel& model, const CircularTrack& track, double t_end, double step) {
    if (t_end <= 0.0) return 0.0;
    const int n = std::max(1, static_cast<int>(std::ceil(t_end / step - 1e-9)));
    const double h = t_end / n;
    double sum = 0.5 * (model.frame_capacity(model.path_loss(track, 0.0)) +
                        model.frame_capacity(model.path_loss(track, t_end)));
    for (int i = 1; i < n; ++i) sum += model.frame_capacity(model.path_loss(track, i * h));
    return sum * h;
}

} // namespace

RandQuadrature rand_capacity_quadrature(const ServingModel& model, double time_step, int panels,
                                        int order) {
    if (!(time_step > 0.0) || time_step > 1.0)
        throw DomainError("rand_capacity_quadrature: time step must lie in (0, 1] s");
    if (panels < 1 || order < 1) throw DomainError("rand_capacity_quadrature: need panels, order >= 1");
    const VisibilityCap& cap = model.cap();
    const double b = model.shell().b;
    const CapChart chart(model);
    const double u_lo = polar_angle_cdf(chart.phi_lo, b), u_hi = polar_angle_cdf(chart.phi_hi, b);
    const auto rule = cosine_rule(panels, order);
    const std::size_t m = rule.size();

    std::vector<double> num(m * m), den(m * m), area(m * m);
    parallel_for(m * m, [&](std::size_t k) {
        const auto [x, wx] = rule[k / m];
        const auto [y, wy] = rule[k % m];
        const double phi = sample_polar_angle(u_lo + x * (u_hi - u_lo), b);
        const double p = std::clamp(phi, chart.phi_lo, chart.phi_hi);
        const auto [lo, hi] = cap_bounds(p, cap.owner, cap.sigma1);
        const double theta = wrap_two_pi(lo + y * (hi - lo));
        const double weight = wx * (u_hi - u_lo) * wy * (hi - lo);
        double c = 0.0, t = 0.0;
        for (int a : {-1, 1}) {
            const SatelliteInit sat{theta, p, a};
            const double t_vis = visibility_time(sat, model.shell(), cap);
            const double t_serv = serving_time(t_vis, model.policy());
            const CircularTrack track(sat, model.shell());
            c += track_capacity(model, track, std::min(t_serv, t_vis), time_step);
            t += t_serv;
        }
        num[k] = weight * c;
        den[k] = weight * t;
        area[k] = weight;
    });
    // Every sum carries the same 1/(4 pi) normalization, so it cancels in each ratio;
    // the conditional means divide by the cap mass, summed over both marks.
    const double mass = 2.0 * pairwise_sum(area.begin(), area.end());
    const double ec = pairwise_sum(num.begin(), num.end());
    const double et = pairwise_sum(den.begin(), den.end());
    return {ec / et, ec / mass, et / mass};
}

// ---------------------------------------------------------------------------

std::vector<FractionalEvent> fractional_events(const EventBatch& batch) {
    std::vector<FractionalEvent> out;
    out.reserve(batch.events.size());
    for (const Event& ev : batch.events) {
        FractionalEvent fe;
        fe.reserve(ev.records.size());
        for (const ServeRecord& r : ev.records) fe.push_back({r.capacity_sum, double(r.frames)});
        out.push_back(std::move(fe));
    }
    return out;
}

namespace {

void check_events(std::span<const FractionalEvent> events) {
    if (events.empty()) throw std::invalid_argument("fractional program: no events");
    for (const FractionalEvent& ev : events)
        if (ev.empty()) throw std::invalid_argument("fractional program: event without candidates");
}

std::size_t best_candidate(const FractionalEvent& ev, double c) {
    std::size_t best = 0;
    double best_value = ev[0].capacity - c * ev[0].frames;
    for (std::size_t k = 1; k < ev.size(); ++k) {
        const double value = ev[k].capacity - c * ev[k].frames;
        if (value > best_value) {
            best = k;
            best_value = value;
        }
    }
    return best;
}

} // namespace

double q_function(double c, std::span<const FractionalEvent> events) {
    check_events(events);
    std::vector<double> terms(events.size());
    for (std::size_t n = 0; n < events.size(); ++n) {
        const FractionalCandidate& best = events[n][best_candidate(events[n], c)];
        terms[n] = best.capacity - c * best.frames;
    }
    return pairwise_sum(terms.begin(), terms.end()) / static_cast<double>(events.size());
}

double default_epsilon(std::span<const FractionalEvent> events) {
    check_events(events);
    double scale = 0.0;
    for (const FractionalEvent& ev : events)
        for (const FractionalCandidate& k : ev) scale = std::max(scale, k.capacity / k.frames);
    return 1e-6 * (scale > 0.0 ? scale : 1.0);
}

DinkelbachTrace dinkelbach_estimate(std::span<const FractionalEvent> events, double c0,
                                    double epsilon, int max_iterations) {
    check_events(events);
    if (!(epsilon >= 0.0)) throw DomainError("dinkelbach_estimate: epsilon must be nonnegative");
    if (!(c0 >= 0.0) || !std::isfinite(c0)) throw DomainError("dinkelbach_estimate: c0 must be >= 0");

    DinkelbachTrace trace;
    trace.selection.resize(events.size());
    std::vector<double> cs(events.size()), ns(events.size());
    double c = c0;
    for (int it = 1; it <= max_iterations; ++it) {
        parallel_for(events.size(), [&](std::size_t n) {
            const std::size_t k = best_candidate(events[n], c);
            trace.selection[n] = k;
            cs[n] = events[n][k].capacity;
            ns[n] = events[n][k].frames;
        });
        c = pairwise_sum(cs.begin(), cs.end()) / pairwise_sum(ns.begin(), ns.end());
        const double q = q_function(c, events);
        trace.iterates.emplace_back(c, q);
        trace.iterations = it;
        if (q < epsilon) {
            trace.converged = true;
            return trace;
        }
    }
    throw DinkelbachError("dinkelbach_estimate: no convergence within " +
                              std::to_string(max_iterations) + " iterations",
                          std::move(trace));
}

BruteForceResult brute_force_optimal(std::span<const FractionalEvent> events,
                                     double max_combinations) {
    check_events(events);
    double combos = 1.0;
    for (const FractionalEvent& ev : events) combos *= static_cast<double>(ev.size());
    if (combos > max_combinations)
        throw DomainError("brute_force_optimal: instance exceeds the combination limit");

    const std::size_t n = events.size();
    std::vector<std::size_t> sel(n, 0);
    BruteForceResult best{-std::numeric_limits<double>::infinity(), sel};
    while (true) {
        double c = 0.0, f = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            c += events[i][sel[i]].capacity;
            f += events[i][sel[i]].frames;
        }
        if (c / f > best.c_star) best = {c / f, sel};
        std::size_t i = 0;
        while (i < n && ++sel[i] == events[i].size()) sel[i++] = 0;
        if (i == n) break;
    }
    return best;
}

OptimalEstimate optimal_capacity(const EventBatch& batch) {
    const std::vector<FractionalEvent> events = fractional_events(batch);
    DinkelbachTrace trace = dinkelbach_estimate(events, 0.0, default_epsilon(events));
    CapacityEstimate est = estimate_selection(batch, trace.selection);
    return {est, std::move(trace)};
}

// ---------------------------------------------------------------------------

CapacityEstimate circ_capacity(const StrategyKind& kind, const ServingModel& model,
                               const std::vector<GridSatellite>& grid, double duration,
                               std::uint64_t seed) {
    if (grid.empty()) throw ConfigError("circ_capacity: empty grid constellation");
    if (!(duration > 0.0)) throw DomainError("circ_capacity: duration must be positive");
    const double dt = model.policy().dt;
    std::vector<double> c, f;
    std::vector<SatelliteInit> positions(grid.size());
    double t = 0.0;
    std::uint64_t handover = 0;
    while (t < duration) {
        for (std::size_t s = 0; s < grid.size(); ++s) positions[s] = grid_position(grid[s], model.shell(), t);
        const VisibleSet visible = visible_snapshot(positions, model.user(), model.cap());
        if (visible.empty()) {
            t += dt;
            continue;
        }
        std::vector<ServeRecord> records;
        if (kind.rule() != StrategyKind::Rule::Rand) {
            records.resize(visible.n_vis(), ServeRecord{visible.sats[0], 0.0, 1, 0.0, 0.0});
            parallel_for(visible.n_vis(),
                         [&](std::size_t k) { records[k] = serving_capacity(visible.sats[k], model); });
        }
        RngStream rng(seed, handover++, 1);
        const std::size_t k = decide(kind, visible, records, rng);
        const ServeRecord r = records.empty() ? serving_capacity(visible.sats[k], model) : records[k];
        c.push_back(r.capacity_sum);
        f.push_back(r.frames);
        t += r.frames * dt;
    }
    if (c.empty()) throw ConfigError("circ_capacity: no satellite was ever visible");
    return ratio_estimate(c, f);
}

double snr_gain_db(double target, const std::function<double(double)>& weak, double max_gain_db) {
    const auto g = [&](double db) { return weak(db) - target; };
    const double lo = -max_gain_db, hi = max_gain_db;
    const double g_lo = g(lo), g_hi = g(hi);
    if (g_lo > 0.0 || g_hi < 0.0)
        throw RootNotFoundError("snr_gain_db: gain outside the search interval", std::min(std::abs(g_lo), std::abs(g_hi)));
    boost::uintmax_t iterations = 100;
    const auto [a, b] = boost::math::tools::toms748_solve(
        g, lo, hi, g_lo, g_hi, boost::math::tools::eps_tolerance<double>(40), iterations);
    return 0.5 * (a + b);
}

} // namespace leocap
