#include "delaycomp/controller.hpp"

namespace delaycomp {

void ControllerConfig::validate() const {
    if (!(alpha1 > 0.0)) throw PreconditionError("controller gain alpha1 must be positive");
    if (!(alpha2 > 0.0)) throw PreconditionError("controller gain alpha2 must be positive");
    if (!(ks > 0.0)) throw PreconditionError("controller gain ks must be positive");
}

TrackingErrors tracking_errors(const Vector& x, const Vector& xdot, const Vector& x_d,
                               const Vector& xdot_d, double alpha1) {
    if (x.size() != x_d.size() || xdot.size() != xdot_d.size() || x.size() != xdot.size()) {
        throw PreconditionError("tracking_errors: dimension mismatch");
    }
    TrackingErrors out;
    out.e1 = x_d - x;
    out.e2 = (xdot_d - xdot) + alpha1 * out.e1;
    return out;
}

Vector control_law(const Vector& e2, const Vector& e2_initial, const Vector& v, double ks) {
    return (ks + 1.0) * (e2 - e2_initial) + v;
}

Vector filter_rate(const Vector& e2, const Vector& e_u, double alpha2, double ks) {
    return (ks + 1.0) * (alpha2 * e2 + e_u);
}

ControllerState::ControllerState(double t0, Eigen::Index dim)
    : v(Vector::Zero(dim)), u_history(t0, Vector::Zero(dim)) {}

Controller::Controller(ControllerConfig cfg, double t0, Eigen::Index dim)
    : cfg_(std::move(cfg)), state_(t0, dim) {
    cfg_.validate();
}

TrackingErrors Controller::errors(const Vector& x, const Vector& xdot, const Vector& x_d,
                                  const Vector& xdot_d) const {
    return tracking_errors(x, xdot, x_d, xdot_d, cfg_.alpha1);
}

Vector Controller::input_mismatch(double t) const {
    const auto& hist = state_.u_history;
    const Vector u_now = hist.eval(t, Lookup::Dense);
    if (cfg_.input_delay.identically_zero()) return Vector::Zero(hist.dim());
    return hist.eval(t - cfg_.input_delay.tau(t), Lookup::Delayed) - u_now;
}

Vector Controller::input_mismatch(double t, const Vector& u_now, LookupStats* stats) const {
    const auto& p = cfg_.input_delay;
    return delayed_value(state_.u_history, t, p.tau(t), p.identically_zero(), u_now, stats) - u_now;
}

Vector Controller::control(const Vector& e2) {
    if (!state_.e2_initial) state_.e2_initial = e2;
    return control_law(e2, *state_.e2_initial, state_.v, cfg_.ks);
}

Vector Controller::control(const Vector& e2, const Vector& v) const {
    if (!state_.e2_initial) {
        throw PreconditionError("Controller::control: e2(t0) has not been captured");
    }
    return control_law(e2, *state_.e2_initial, v, cfg_.ks);
}

Vector Controller::v_rate(const Vector& e2, const Vector& e_u) const {
    return filter_rate(e2, e_u, cfg_.alpha2, cfg_.ks);
}

void Controller::commit(double t, const Vector& v, const Vector& u) {
    state_.v = v;
    state_.u_history.append(t, u);
}

}  // namespace delaycomp
