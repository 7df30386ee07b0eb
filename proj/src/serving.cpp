#include "leocap/serving.hpp"

#include <algorithm>
#include <cmath>

#include "leocap/errors.hpp"

namespace leocap {

namespace {
// Guards floor/ceil against t/dt landing a rounding error below an integer.
constexpr double frame_slack = 1e-9;
} // namespace

ServingPolicy::ServingPolicy(double t_min_, double t_max_, double dt_)
    : t_min(t_min_), t_max(t_max_), dt(dt_) {
    if (!(t_min >= 0.0) || !(t_max > 0.0) || !(dt > 0.0) || !std::isfinite(dt) ||
        !std::isfinite(t_min))
        throw DomainError("ServingPolicy: need t_min >= 0, t_max > 0, dt > 0");
    if (t_min > t_max) throw DomainError("ServingPolicy: t_min exceeds t_max");
    if (dt > t_max) throw DomainError("ServingPolicy: frame longer than the maximum serve");
}

double serving_time(double t_vis, const ServingPolicy& policy) {
    return std::min(std::max(t_vis, policy.t_min), policy.t_max);
}

int frame_count(double t_serv, double dt) {
    if (t_serv < dt * (1.0 - frame_slack))
        throw DomainError("frame_count: serving time shorter than one frame");
    return std::max(1, static_cast<int>(std::floor(t_serv / dt + frame_slack)));
}

int visible_frames(double t_vis, double dt) {
    return std::max(1, static_cast<int>(std::ceil(t_vis / dt - frame_slack)));
}

ServingModel::ServingModel(const GroundUser& user, const OrbitShell& shell,
                           const ServingPolicy& policy, double gamma,
                           std::optional<FadingParams> fading)
    : user_(user), shell_(shell), cap_(make_cap(user, shell.R)), policy_(policy), gamma_(gamma),
      curve_(std::make_shared<const CapacityCurve>(std::move(fading))), user_unit_(user.unit()) {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw DomainError("ServingModel: gamma must be positive and finite");
}

ServingModel ServingModel::with_gamma(double gamma) const {
    if (!(gamma > 0.0) || !std::isfinite(gamma))
        throw DomainError("ServingModel: gamma must be positive and finite");
    ServingModel out = *this;
    out.gamma_ = gamma;
    return out;
}

ServingModel ServingModel::with_policy(const ServingPolicy& policy) const {
    ServingModel out = *this;
    out.policy_ = policy;
    return out;
}

double ServingModel::path_loss(const CircularTrack& track, double t) const {
    const double r = user_.r, R = shell_.R;
    const double cos_sigma = clamp_unit(user_unit_.dot(track.direction(t)));
    return std::max(0.0, r * r + R * R - 2.0 * r * R * cos_sigma);
}

double ServingModel::segment_capacity(const CircularTrack& track, int first, int count) const {
    double sum = 0.0;
    for (int i = first; i < first + count; ++i)
        sum += frame_capacity(path_loss(track, i * policy_.dt));
    return sum;
}

ServeRecord serving_capacity(const SatelliteInit& sat, const ServingModel& model) {
    const ServingPolicy& policy = model.policy();
    const CircularTrack track(sat, model.shell());
    const double t_vis = visibility_time(sat, model.shell(), model.cap());
    const double t_serv = std::max(serving_time(t_vis, policy), policy.dt);
    const int frames = frame_count(t_serv, policy.dt);
    const int lit = std::min(frames, visible_frames(t_vis, policy.dt));

    const double first = model.frame_capacity(model.path_loss(track, 0.0));
    return {sat, model.segment_capacity(track, 0, lit), frames, first, t_vis};
}

} // namespace leocap
