#pragma once

// Tracking controller built from measurable signals only:
//
//   e1 = x_d - x
//   e2 = de1/dt + alpha1 e1
//   e_u = u(t - tau_i) - u(t)                (past controls, zero before t0)
//   u  = (ks + 1)(e2 - e2(t0)) + v
//   dv/dt = (ks + 1)(alpha2 e2 + e_u),  v(t0) = 0
//
// The controller sees the input-delay profile it was configured with (which
// may be a deliberately mis-scaled copy of the true one) and never the state
// delay or plant internals.

#include "delaycomp/delay_profile.hpp"
#include "delaycomp/trajectory_history.hpp"
#include "delaycomp/types.hpp"

#include <optional>

namespace delaycomp {

struct ControllerConfig {
    double alpha1 = 2.0;
    double alpha2 = 3.0;
    double ks = 1.0;
    DelayProfile input_delay = DelayProfile::constant(0.0);

    /// Throws PreconditionError unless alpha1, alpha2, ks > 0.
    void validate() const;
};

struct TrackingErrors {
    Vector e1;
    Vector e2;
};

[[nodiscard]] TrackingErrors tracking_errors(const Vector& x, const Vector& xdot, const Vector& x_d,
                                             const Vector& xdot_d, double alpha1);

[[nodiscard]] Vector control_law(const Vector& e2, const Vector& e2_initial, const Vector& v,
                                 double ks);

[[nodiscard]] Vector filter_rate(const Vector& e2, const Vector& e_u, double alpha2, double ks);

struct ControllerState {
    Vector v;
    std::optional<Vector> e2_initial;  ///< frozen at the first control evaluation
    SampleBuffer u_history;            ///< seeded with u(t0) = 0

    ControllerState(double t0, Eigen::Index dim);
};

class Controller {
public:
    Controller(ControllerConfig cfg, double t0, Eigen::Index dim);

    [[nodiscard]] TrackingErrors errors(const Vector& x, const Vector& xdot, const Vector& x_d,
                                        const Vector& xdot_d) const;

    /// e_u at a stored time t <= newest control sample.
    [[nodiscard]] Vector input_mismatch(double t) const;
    /// e_u at an integration stage, with the stage-local control `u_now`.
    [[nodiscard]] Vector input_mismatch(double t, const Vector& u_now, LookupStats* stats) const;

    /// u from the stored filter state. The first call freezes e2(t0).
    [[nodiscard]] Vector control(const Vector& e2);
    /// u for an explicit filter value (integration stages). Requires e2(t0).
    [[nodiscard]] Vector control(const Vector& e2, const Vector& v) const;

    [[nodiscard]] Vector v_rate(const Vector& e2, const Vector& e_u) const;

    /// Stores the filter state and the control applied at a step boundary.
    void commit(double t, const Vector& v, const Vector& u);
    void prune(double horizon) { state_.u_history.prune(horizon); }

    [[nodiscard]] const ControllerConfig& config() const noexcept { return cfg_; }
    [[nodiscard]] const ControllerState& state() const noexcept { return state_; }

private:
    ControllerConfig cfg_;
    ControllerState state_;
};

}  // namespace delaycomp
