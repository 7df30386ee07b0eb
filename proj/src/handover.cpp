#include "leocap/handover.hpp"

#include <cmath>
#include <stdexcept>

#include "leocap/errors.hpp"

namespace leocap {

StrategyKind StrategyKind::opt(double c_star) {
    if (!(c_star >= 0.0) || !std::isfinite(c_star))
        throw DomainError("StrategyKind::opt: c_star must be finite and nonnegative");
    return StrategyKind(Rule::Opt, c_star);
}

StrategyKind StrategyKind::parse(const std::string& name) {
    if (name == "rand") return rand();
    if (name == "msc0") return msc0();
    if (name == "msc") return msc();
    if (name == "opt") return opt(0.0);
    throw ConfigError("unknown strategy '" + name + "' (expected rand, msc0, msc or opt)");
}

std::string StrategyKind::name() const {
    switch (rule_) {
    case Rule::Rand: return "rand";
    case Rule::MSC0: return "msc0";
    case Rule::MSC: return "msc";
    case Rule::Opt: return "opt";
    }
    return "?";
}

namespace {

template <typename Score>
std::size_t argmax(std::span<const ServeRecord> records, Score score) {
    std::size_t best = 0;
    double best_value = score(records[0]);
    for (std::size_t k = 1; k < records.size(); ++k) {
        const double value = score(records[k]);
        if (value > best_value) {
            best = k;
            best_value = value;
        }
    }
    return best;
}

} // namespace

std::size_t decide(const StrategyKind& kind, const VisibleSet& visible,
                   std::span<const ServeRecord> records, RngStream& rng) {
    if (visible.empty()) throw std::invalid_argument("decide: empty visible set");
    if (kind.rule() == StrategyKind::Rule::Rand) return rng.index(visible.n_vis());
    if (records.size() != visible.n_vis())
        throw std::invalid_argument("decide: records not aligned with the visible set");

    switch (kind.rule()) {
    case StrategyKind::Rule::MSC0:
        return argmax(records, [](const ServeRecord& r) { return r.initial_capacity; });
    case StrategyKind::Rule::MSC:
        return argmax(records, [](const ServeRecord& r) { return r.capacity_sum / r.frames; });
    case StrategyKind::Rule::Opt: {
        const double c = kind.c_star();
        return argmax(records, [c](const ServeRecord& r) { return r.capacity_sum - c * r.frames; });
    }
    case StrategyKind::Rule::Rand: break;
    }
    return 0;
}

double msc0_metric(const SatelliteInit& sat, const ServingModel& model) {
    const CircularTrack track(sat, model.shell());
    return model.frame_capacity(model.path_loss(track, 0.0));
}

} // namespace leocap
