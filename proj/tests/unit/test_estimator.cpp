#include <doctest.h>

#include <cmath>
#include <numeric>
#include <vector>

#include "fixtures.hpp"
#include "leocap/estimator.hpp"
#include "leocap/parallel.hpp"

using namespace leocap;
using fixtures::deg;

namespace {

ServingModel melbourne(const ServingPolicy& policy, std::optional<FadingParams> fading = average_shadowing()) {
    return {fixtures::melbourne(), fixtures::starlink(), policy, 1e12, fading};
}

const ConstellationParams& nbpp() {
    static const ConstellationParams p = ConstellationParams::nbpp(3168, fixtures::starlink());
    return p;
}

} // namespace

TEST_CASE("ratio estimator") {
    const std::vector<double> c = {10, 4, 7}, n = {5, 2, 4};
    const CapacityEstimate e = ratio_estimate(c, n);
    CHECK(e.value == doctest::Approx(21.0 / 11.0));
    double ss = 0.0;
    for (int i = 0; i < 3; ++i) ss += std::pow(c[i] - e.value * n[i], 2);
    CHECK(e.std_error == doctest::Approx(std::sqrt(ss / 6.0) / (11.0 / 3.0)));
    CHECK(e.n_renewals == 3);
    const CapacityEstimate one = ratio_estimate(std::vector<double>{3.3}, std::vector<double>{3});
    CHECK(one.value == doctest::Approx(1.1));
    CHECK(one.std_error == 0.0);
}

TEST_CASE("degenerate batch with a single fixed satellite") {
    const ServingModel model = melbourne(ServingPolicy::fixed(15));
    const GroundUser& u = model.user();
    Event ev;
    ev.visible.sats = {SatelliteInit{u.theta_u, u.phi_u, 1}};
    ev.records = {serving_capacity(ev.visible.sats[0], model)};
    const EventBatch batch{1, {ev}};
    for (const StrategyKind& k : {StrategyKind::rand(), StrategyKind::msc0(), StrategyKind::msc()})
        CHECK(estimate(k, batch).value == ev.records[0].capacity_sum / 15.0);
}

TEST_CASE("parallel helpers are order independent") {
    std::vector<double> a(1000), b(1000);
    parallel_for(a.size(), [&](std::size_t i) { a[i] = std::sin(double(i)); }, 1);
    parallel_for(b.size(), [&](std::size_t i) { b[i] = std::sin(double(i)); }, 7);
    CHECK(a == b);
    CHECK(pairwise_sum(a.begin(), a.end()) == pairwise_sum(b.begin(), b.end()));
    std::vector<double> ones(1001, 1.0);
    CHECK(pairwise_sum(ones.begin(), ones.end()) == 1001.0);
}

TEST_CASE("event batches are reproducible") {
    const ServingModel model = melbourne(ServingPolicy::fixed(15));
    const EventBatch a = generate_events(model, nbpp(), 50, 7), b = generate_events(model, nbpp(), 50, 7);
    for (std::size_t i = 0; i < 50; ++i) {
        REQUIRE(a.events[i].records.size() == b.events[i].records.size());
        for (std::size_t k = 0; k < a.events[i].records.size(); ++k)
            CHECK(a.events[i].records[k].capacity_sum == b.events[i].records[k].capacity_sum);
    }
    CHECK(persistent_capacity_mc(StrategyKind::rand(), model, nbpp(), 50, 7).value ==
          estimate(StrategyKind::rand(), a).value);
}

TEST_CASE("non-persistent capacity is the one-frame persistent capacity") {
    const ServingModel model = melbourne(ServingPolicy::unconstrained());
    const ServingModel single = model.with_policy(ServingPolicy::one_frame());
    for (const StrategyKind& k : {StrategyKind::rand(), StrategyKind::msc0(), StrategyKind::msc()}) {
        const CapacityEstimate np = nonpersistent_capacity(k, model, nbpp(), 200, 3);
        const CapacityEstimate p = persistent_capacity_mc(k, single, nbpp(), 200, 3);
        CHECK(np.value == p.value);
        CHECK(np.std_error == p.std_error);
    }
    CHECK(nonpersistent_capacity(StrategyKind::msc0(), model, nbpp(), 200, 3).value ==
          nonpersistent_capacity(StrategyKind::msc(), model, nbpp(), 200, 3).value);
}

TEST_CASE("upper bound") {
    SUBCASE("single-frame AWGN bound is the zenith capacity") {
        const ServingModel model = melbourne(ServingPolicy::one_frame(), std::nullopt);
        const UpperBound ub = upper_bound(model, 32);
        const double h = model.shell().h;
        CHECK(ub.value == doctest::Approx(std::log2(1 + 1e12 / (h * h))).epsilon(1e-6));
        CHECK(central_angle(model.user(), ub.theta, ub.phi) < 1e-3);
    }
    SUBCASE("dominates every strategy and the optimum") {
        const ServingModel model = melbourne(ServingPolicy::fixed(15));
        const EventBatch batch = generate_events(model, nbpp(), 300, 11);
        const double ub = upper_bound(model, 48).value;
        for (const StrategyKind& k : {StrategyKind::rand(), StrategyKind::msc0(), StrategyKind::msc()}) {
            const CapacityEstimate e = estimate(k, batch);
            CHECK(e.value - 3 * e.std_error <= ub);
        }
        CHECK(optimal_capacity(batch).estimate.value <= ub);
    }
    SUBCASE("unconstrained maximizer sits near the entry of an overhead pass") {
        const ServingModel model = melbourne(ServingPolicy::unconstrained());
        const UpperBound ub = upper_bound(model, 48);
        const VisibilityCap& cap = model.cap();
        const SatelliteInit best{ub.theta, ub.phi, ub.a};
        const CircularTrack track(best, model.shell());
        double sigma_min = cap.sigma1;
        for (double t = 0; t < visibility_time(best, model.shell(), cap); t += 0.5) {
            const auto [th, ph] = track.spherical(t);
            sigma_min = std::min(sigma_min, central_angle(model.user(), th, ph));
        }
        const double sigma0 = central_angle(model.user(), ub.theta, ub.phi);
        CHECK(sigma0 > 0.3 * cap.sigma1);    // not at the zenith
        CHECK(sigma_min < 0.2 * cap.sigma1);  // the pass goes nearly overhead
        // Cross-check against a dense scan of both direction fields.
        double dense = 0.0;
        for (int a : {-1, 1})
            for (const FieldPoint& p : serving_capacity_field(model, a, 128, 128)) dense = std::max(dense, p.ratio);
        CHECK(ub.value >= dense * (1 - 1e-3));
        CHECK(ub.value <= dense * 1.01);
    }
    CHECK_THROWS_AS(upper_bound(melbourne(ServingPolicy::fixed(15)), 16), DomainError);
}

TEST_CASE("Gauss-Legendre rule") {
    for (int order : {1, 4, 9}) {
        const auto [x, w] = gauss_legendre(order);
        for (int p = 0; p < 2 * order; ++p) {
            double q = 0.0;
            for (int k = 0; k < order; ++k) q += w[k] * std::pow(x[k], p);
            CHECK(q == doctest::Approx(p % 2 ? 0.0 : 2.0 / (p + 1)).scale(1).epsilon(1e-13));
        }
    }
}

TEST_CASE("random-handover quadrature") {
    SUBCASE("tiny cap gives the zenith capacity") {
        const GroundUser user(constants::earth_radius, 144.96 * deg, (90 + 37.81) * deg, 89.0 * deg);
        const ServingModel model(user, fixtures::starlink(), ServingPolicy::unconstrained(0.1), 1e12,
                                 average_shadowing());
        const double h = model.shell().h;
        const RandQuadrature q = rand_capacity_quadrature(model, 0.01, 2, 6);
        CHECK(q.value == doctest::Approx(model.frame_capacity(h * h)).epsilon(1e-3));
    }
    SUBCASE("agrees with Monte Carlo and converges in the time step") {
        const ServingModel model = melbourne(ServingPolicy::fixed(15));
        const RandQuadrature q = rand_capacity_quadrature(model, 0.25);
        const RandQuadrature fine = rand_capacity_quadrature(model, 0.125);
        CHECK(std::abs(fine.value / q.value - 1) < 1e-3);
        CHECK(q.mean_time == doctest::Approx(15.0));
        const CapacityEstimate mc = persistent_capacity_mc(StrategyKind::rand(), model, nbpp(), 1000, 2);
        CHECK(std::abs(q.value - mc.value) < 3 * mc.std_error + 0.01 * q.value);
        const RandQuadrature refined = rand_capacity_quadrature(model, 0.25, 16, 8);
        CHECK(refined.value == doctest::Approx(q.value).epsilon(1e-4));
    }
}

TEST_CASE("strategy ordering on shared seeds") {
    for (const ServingPolicy& policy : {ServingPolicy::fixed(15), ServingPolicy::unconstrained()}) {
        const ServingModel model = melbourne(policy);
        const EventBatch batch = generate_events(model, nbpp(), 400, 5);
        const CapacityEstimate r = estimate(StrategyKind::rand(), batch);
        const CapacityEstimate m0 = estimate(StrategyKind::msc0(), batch);
        const CapacityEstimate m = estimate(StrategyKind::msc(), batch);
        const OptimalEstimate opt = optimal_capacity(batch);
        CHECK(r.value <= m0.value + 3 * m0.std_error);
        CHECK(m0.value <= m.value + 3 * m.std_error);
        CHECK(m.value <= opt.estimate.value + 1e-12);
        CHECK(opt.trace.converged);
        CHECK(opt.trace.iterations <= 10);
        CHECK(opt.estimate.value == doctest::Approx(opt.trace.c_star()).epsilon(1e-12));
        CHECK(opt.estimate.value <= upper_bound(model, 32).value);
    }
}

TEST_CASE("re-evaluation at a new SNR") {
    const ServingModel model = melbourne(ServingPolicy::fixed(15));
    const EventBatch batch = generate_events(model, nbpp(), 100, 8);
    const auto sel = selections(StrategyKind::rand(), batch);
    CHECK(reevaluate(batch, sel, model).value == doctest::Approx(estimate(StrategyKind::rand(), batch).value).epsilon(1e-14));
    const ServingModel louder = model.with_gamma(1e13);
    const EventBatch batch_loud = generate_events(louder, nbpp(), 100, 8);
    CHECK(reevaluate(batch, sel, louder).value ==
          doctest::Approx(estimate(StrategyKind::rand(), batch_loud).value).epsilon(1e-14));
}

TEST_CASE("SNR gain root") {
    CHECK(snr_gain_db(1.2, [](double g) { return 1.0 + 0.1 * g; }) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(snr_gain_db(2.0, [](double g) { return 1.0 + 0.1 * g; }, 10.0) == doctest::Approx(10.0).epsilon(1e-9));
    CHECK_THROWS_AS(snr_gain_db(5.0, [](double g) { return 1.0 + 0.1 * g; }), RootNotFoundError);
}

TEST_CASE("deterministic grid simulation") {
    const ServingModel model = melbourne(ServingPolicy::fixed(15));
    RngStream rng(1, 0, 2);
    const auto grid = grid_constellation(ConstellationParams::grid(72, 22, model.shell()), random_phase_offsets(72, rng));
    const double duration = model.shell().T_sat;
    const CapacityEstimate r = circ_capacity(StrategyKind::rand(), model, grid, duration, 1);
    const CapacityEstimate m = circ_capacity(StrategyKind::msc(), model, grid, duration, 1);
    CHECK(r.n_renewals > 100);
    CHECK(m.value > r.value);
    CHECK(m.value <= upper_bound(model, 32).value);
    CHECK(circ_capacity(StrategyKind::rand(), model, grid, duration, 1).value == r.value);
}
