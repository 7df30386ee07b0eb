#pragma once
// Serving-time clamp, frame counts and the total capacity of one serve.

#include <cstddef>
#include <limits>
#include <memory>
#include <optional>

#include "leocap/channel.hpp"
#include "leocap/geometry.hpp"

namespace leocap {

struct ServingPolicy {
    double t_min;  // s
    double t_max;  // s, may be +inf
    double dt;     // frame duration, s

    ServingPolicy(double t_min_, double t_max_, double dt_);

    static ServingPolicy unconstrained(double dt = 1.0) {
        return {0.0, std::numeric_limits<double>::infinity(), dt};
    }
    static ServingPolicy fixed(double t_serv, double dt = 1.0) { return {t_serv, t_serv, dt}; }
    /// Single-frame serves: the non-persistent channel.
    static ServingPolicy one_frame(double dt = 1.0) { return {dt, dt, dt}; }
};

struct ServeRecord {
    SatelliteInit sat;
    double capacity_sum;      // bits per use, summed over the serve
    int frames;               // frames charged to the serve
    double initial_capacity;  // capacity of the first frame
    double visibility_time;   // s

    double ratio() const { return capacity_sum / frames; }
};

double serving_time(double t_vis, const ServingPolicy& policy);

/// floor(t_serv / dt). Throws DomainError when the serve is shorter than a frame.
int frame_count(double t_serv, double dt);

/// Everything needed to score a serve: user, shell, policy, SNR and fading.
///
/// The capacity curve is shared between copies, so re-targeting the SNR or
/// the policy is cheap.
class ServingModel {
public:
    ServingModel(const GroundUser& user, const OrbitShell& shell, const ServingPolicy& policy,
                 double gamma, std::optional<FadingParams> fading);

    const GroundUser& user() const { return user_; }
    const OrbitShell& shell() const { return shell_; }
    const VisibilityCap& cap() const { return cap_; }
    const ServingPolicy& policy() const { return policy_; }
    double gamma() const { return gamma_; }
    const std::optional<FadingParams>& fading() const { return curve_->fading(); }

    ServingModel with_gamma(double gamma) const;
    ServingModel with_policy(const ServingPolicy& policy) const;

    /// Capacity of one frame at path loss `ell` (m^2).
    double frame_capacity(double ell) const { return (*curve_)(gamma_ / ell); }

    /// Squared user-satellite distance at time t along `track`.
    double path_loss(const CircularTrack& track, double t) const;

    /// Sum of frame capacities for frames [first, first + count).
    double segment_capacity(const CircularTrack& track, int first, int count) const;

private:
    GroundUser user_;
    OrbitShell shell_;
    VisibilityCap cap_;
    ServingPolicy policy_;
    double gamma_;
    std::shared_ptr<const CapacityCurve> curve_;
    Vector3<double> user_unit_;
};

/// Number of frames whose start lies inside the cap (at least one).
int visible_frames(double t_vis, double dt);

/// One renewal's reward. Frames after the satellite leaves the cap are dark
/// and contribute no capacity but still count toward the serve.
ServeRecord serving_capacity(const SatelliteInit& sat, const ServingModel& model);

} // namespace leocap
