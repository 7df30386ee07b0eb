#pragma once
// Handover decision rules over a set of visible satellites.

#include <cstddef>
#include <span>
#include <string>

#include "leocap/constellation.hpp"
#include "leocap/rng.hpp"
#include "leocap/serving.hpp"

namespace leocap {

class StrategyKind {
public:
    enum class Rule { Rand, MSC0, MSC, Opt };

    static StrategyKind rand() { return StrategyKind(Rule::Rand, 0.0); }
    static StrategyKind msc0() { return StrategyKind(Rule::MSC0, 0.0); }
    static StrategyKind msc() { return StrategyKind(Rule::MSC, 0.0); }
    /// Maximizes C - c_star * N; c_star must be finite and nonnegative.
    static StrategyKind opt(double c_star);

    /// Parses "rand", "msc0", "msc" or "opt" (Opt starts with c_star = 0).
    static StrategyKind parse(const std::string& name);

    Rule rule() const { return rule_; }
    double c_star() const { return c_star_; }
    std::string name() const;

    bool operator==(const StrategyKind&) const = default;

private:
    StrategyKind(Rule rule, double c_star) : rule_(rule), c_star_(c_star) {}

    Rule rule_;
    double c_star_;
};

/// Index of the chosen satellite; ties go to the lowest index.
///
/// `records` must be aligned with `visible` for every rule except Rand, which
/// ignores them and draws exactly one number from `rng`.
std::size_t decide(const StrategyKind& kind, const VisibleSet& visible,
                   std::span<const ServeRecord> records, RngStream& rng);

/// Non-persistent score: capacity of the first frame at the initial position.
double msc0_metric(const SatelliteInit& sat, const ServingModel& model);

} // namespace leocap
