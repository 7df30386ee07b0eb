#pragma once
// Persistent-capacity estimation: renewal Monte Carlo, bounds, the
// deterministic-grid baseline and the Dinkelbach-type optimizer.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include "leocap/constellation.hpp"
#include "leocap/errors.hpp"
#include "leocap/handover.hpp"
#include "leocap/serving.hpp"

namespace leocap {

struct CapacityEstimate {
    double value = 0.0;      // bits per use
    double std_error = 0.0;  // bits per use
    std::size_t n_renewals = 0;
};

/// Ratio estimator sum(C) / sum(N) with a delta-method standard error.
CapacityEstimate ratio_estimate(std::span<const double> capacity, std::span<const double> frames);

// ---------------------------------------------------------------------------
// Renewal Monte Carlo

/// One handover event: the visible set and a serve record per candidate.
struct Event {
    VisibleSet visible;
    std::vector<ServeRecord> records;
};

/// A frozen batch of i.i.d. events. Event i is drawn from stream (seed, i, 0)
/// and its random decision from stream (seed, i, 1), so strategies evaluated on
/// one batch share their constellation realizations.
struct EventBatch {
    std::uint64_t seed = 0;
    std::vector<Event> events;
};

EventBatch generate_events(const ServingModel& model, const ConstellationParams& params,
                           std::size_t n_renewals, std::uint64_t seed);

/// Chosen candidate index for every event of the batch.
std::vector<std::size_t> selections(const StrategyKind& kind, const EventBatch& batch);

CapacityEstimate estimate(const StrategyKind& kind, const EventBatch& batch);

/// Persistent capacity of fixed selections, re-served under `model` (e.g. a new SNR).
CapacityEstimate reevaluate(const EventBatch& batch, std::span<const std::size_t> selection,
                            const ServingModel& model);

CapacityEstimate persistent_capacity_mc(const StrategyKind& kind, const ServingModel& model,
                                        const ConstellationParams& params,
                                        std::size_t n_renewals, std::uint64_t seed);

/// Mean first-frame capacity of the chosen satellite; identical to the
/// persistent estimate under single-frame serves on the same seed.
CapacityEstimate nonpersistent_capacity(const StrategyKind& kind, const ServingModel& model,
                                        const ConstellationParams& params, std::size_t n_samples,
                                        std::uint64_t seed);

// ---------------------------------------------------------------------------
// Bounds

struct FieldPoint {
    double theta;
    double phi;
    double ratio;  // serving capacity C / N
};

/// C/N over a (polar angle) x (longitude) grid spanning the part of the cap
/// inside the inclination band, for direction mark `a`.
std::vector<FieldPoint> serving_capacity_field(const ServingModel& model, int a, int n_theta,
                                               int n_phi);

struct UpperBound {
    double value;
    double theta;
    double phi;
    int a;
};

/// Largest C/N over the cap and both directions: grid scan followed by
/// one-dimensional refinements in polar angle and then longitude.
UpperBound upper_bound(const ServingModel& model, int grid_resolution);

struct RandQuadrature {
    double value;          // E[C_t] / E[T_serv], bits per use
    double mean_capacity;  // E[C_t] restricted to the cap, bit-seconds per use
    double mean_time;      // E[T_serv] restricted to the cap, s
};

/// Random-handover persistent capacity by numerical integration over the cap.
///
/// The polar angle is integrated in its CDF variable (absorbing the density),
/// both axes use a cosine map to cluster nodes at the edges, and each axis is
/// a composite Gauss-Legendre rule of `panels` x `order` nodes. Capacity along
/// each track is integrated in time with the trapezoid rule at `time_step`.
RandQuadrature rand_capacity_quadrature(const ServingModel& model, double time_step,
                                        int panels = 8, int order = 8);

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
std::pair<std::vector<double>, std::vector<double>> gauss_legendre(int order);

// ---------------------------------------------------------------------------
// Fractional programming

struct FractionalCandidate {
    double capacity;  // C_k
    double frames;    // N_k
};
using FractionalEvent = std::vector<FractionalCandidate>;

std::vector<FractionalEvent> fractional_events(const EventBatch& batch);

/// (1/N) sum_n max_k (C_kn - c N_kn).
double q_function(double c, std::span<const FractionalEvent> events);

struct DinkelbachTrace {
    std::vector<std::pair<double, double>> iterates;  // (c, q(c)) after each update
    bool converged = false;
    int iterations = 0;
    std::vector<std::size_t> selection;

    double c_star() const { return iterates.empty() ? 0.0 : iterates.back().first; }
};

class DinkelbachError : public NumericalError {
public:
    DinkelbachError(const std::string& what, DinkelbachTrace trace)
        : NumericalError(what, trace.iterates.empty() ? 0.0 : trace.iterates.back().second),
          trace_(std::move(trace)) {}

    const DinkelbachTrace& trace() const { return trace_; }

private:
    DinkelbachTrace trace_;
};

/// 1e-6 times the largest single-candidate ratio C/N.
double default_epsilon(std::span<const FractionalEvent> events);

/// Per-event argmax of C - cN, then c <- sum C / sum N, until q(c) < epsilon.
/// Throws DinkelbachError (carrying the trace) after `max_iterations`.
DinkelbachTrace dinkelbach_estimate(std::span<const FractionalEvent> events, double c0,
                                    double epsilon, int max_iterations = 100);

struct BruteForceResult {
    double c_star;
    std::vector<std::size_t> selection;
};

/// Exhaustive maximum of sum C / sum N over all per-event selections.
BruteForceResult brute_force_optimal(std::span<const FractionalEvent> events,
                                     double max_combinations = 1e6);

/// Optimal-strategy capacity on a frozen batch: Dinkelbach from c0 = 0.
struct OptimalEstimate {
    CapacityEstimate estimate;
    DinkelbachTrace trace;
};
OptimalEstimate optimal_capacity(const EventBatch& batch);

// ---------------------------------------------------------------------------
// Deterministic grid baseline and SNR gains

/// Runs a handover strategy on a propagated grid constellation for `duration`
/// seconds, handing over whenever a serve ends. Times with no visible satellite
/// are skipped one frame at a time.
CapacityEstimate circ_capacity(const StrategyKind& kind, const ServingModel& model,
                               const std::vector<GridSatellite>& grid, double duration,
                               std::uint64_t seed);

/// SNR offset (dB) such that weak(gamma * 10^(gain/10)) == target.
/// `weak` must be nondecreasing in its argument, which is a gain in dB.
double snr_gain_db(double target, const std::function<double(double)>& weak, double max_gain_db = 10.0);

} // namespace leocap
