#include "delaycomp/lk_monitor.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace delaycomp {

Vector r_signal(const Vector& e2_dot, const Vector& e2, const Vector& e_u, const GainSet& g) {
    return e2_dot + g.alpha2 * e2 + e_u;
}

CompositeState composite_state(const Vector& e1, const Vector& e2, const Vector& r,
                               const Vector& e_u, const LKSignals& lk) {
    const auto n = e1.size();
    CompositeState out;
    out.z.resize(4 * n);
    out.z << e1, e2, r, e_u;
    out.z_acute = out.z.head(3 * n);
    out.y.resize(3 * n + 4);
    out.y << out.z_acute, std::sqrt(lk.P), std::sqrt(lk.Q), std::sqrt(lk.R), std::sqrt(lk.S);
    return out;
}

double lyapunov(const CompositeState& zs, const LKSignals& lk) {
    return 0.5 * zs.z_acute.squaredNorm() + lk.sum();
}

// ---------------------------------------------------------------------------
// CumulativeIntegral

CumulativeIntegral::CumulativeIntegral(double t0) : t0_(t0) {}

void CumulativeIntegral::push(double t, double w) {
    if (nodes_.empty()) {
        if (t != t0_) throw PreconditionError("CumulativeIntegral: first sample must be at t0");
        nodes_.push_back(Node{t, w, 0.0, 0.0});
        return;
    }
    const Node& last = nodes_.back();
    if (!(t > last.t)) throw PreconditionError("CumulativeIntegral: times must increase");
    const double dt = t - last.t;
    const double U = last.U + 0.5 * dt * (last.w + w);
    const double W = last.W + 0.5 * dt * (last.U + U);
    nodes_.push_back(Node{t, w, U, W});
}

CumulativeIntegral::Partial CumulativeIntegral::locate(double a) const {
    const Node& first = nodes_.front();
    if (a < first.t) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "CumulativeIntegral: lower limit " << a << " precedes retained history (first "
            << first.t << ")";
        throw HistoryError(msg.str());
    }
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), a,
                               [](double v, const Node& n) { return v < n.t; });
    const auto next = static_cast<std::size_t>(it - nodes_.begin());
    const Node& lo = nodes_[next - 1];
    if (lo.t == a || next == nodes_.size()) return {next, lo.U};
    const Node& hi = nodes_[next];
    const double w_a = lo.w + (hi.w - lo.w) * (a - lo.t) / (hi.t - lo.t);
    return {next, lo.U + 0.5 * (a - lo.t) * (lo.w + w_a)};
}

double CumulativeIntegral::single(double a) const {
    a = std::max(a, t0_);
    return nodes_.back().U - locate(a).U_a;
}

double CumulativeIntegral::nested(double a) const {
    const Node& last = nodes_.back();
    double pre = 0.0;
    if (a < t0_) {
        if (nodes_.front().t != t0_) throw HistoryError("CumulativeIntegral: t0 no longer retained");
        // w vanishes before t0, so the inner integral is constant there.
        pre = (t0_ - a) * (last.U - nodes_.front().U);
        a = t0_;
    }
    const Partial p = locate(a);
    if (p.next == nodes_.size()) return pre;
    const Node& nx = nodes_[p.next];
    const double first_panel = 0.5 * (nx.t - a) * ((last.U - p.U_a) + (last.U - nx.U));
    const double rest = (last.t - nx.t) * last.U - (last.W - nx.W);
    return pre + first_panel + rest;
}

void CumulativeIntegral::prune(double horizon) {
    if (nodes_.size() < 3) return;
    const double cut = nodes_.back().t - horizon;
    bool popped = false;
    while (nodes_.size() > 2 && nodes_[1].t <= cut) {
        nodes_.pop_front();
        popped = true;
    }
    if (!popped || nodes_.front().t == t0_) return;
    // Rebase so that U and W restart from the oldest retained node.
    const double c = nodes_.front().U;
    nodes_.front().U = 0.0;
    nodes_.front().W = 0.0;
    for (std::size_t k = 1; k < nodes_.size(); ++k) {
        Node& cur = nodes_[k];
        const Node& prev = nodes_[k - 1];
        cur.U -= c;
        cur.W = prev.W + 0.5 * (cur.t - prev.t) * (prev.U + cur.U);
    }
}

// ---------------------------------------------------------------------------
// Monitor

namespace {

double retention_horizon(const MonitorContext& ctx) {
    const double tau_max = std::max({ctx.input_delay.phi1(), ctx.state_delay.phi1(),
                                     sampled_max_tau(ctx.input_delay, {ctx.t0, ctx.t0}),
                                     sampled_max_tau(ctx.state_delay, {ctx.t0, ctx.t0})});
    return tau_max + 4.0 * ctx.h;
}

}  // namespace

Monitor::Monitor(MonitorContext ctx)
    : ctx_(std::move(ctx)),
      input_integral_(ctx_.t0),
      state_integral_(ctx_.t0),
      horizon_(retention_horizon(ctx_)) {}

Vector Monitor::s2(double t) const {
    const auto& traj = ctx_.trajectory;
    const Vector xd = traj.x(t);
    const Vector xd_dot = traj.xdot(t);
    Vector xd_del = xd, xd_dot_del = xd_dot;
    if (!ctx_.state_delay.identically_zero()) {
        const double target = t - ctx_.state_delay.tau(t);
        if (target <= ctx_.t0) {
            xd_del.setZero();
            xd_dot_del.setZero();
        } else {
            xd_del = traj.x(target);
            xd_dot_del = traj.xdot(target);
        }
    }
    return traj.xddot(t) - ctx_.plant.f(xd, xd_dot, t) - ctx_.plant.g(xd_del, xd_dot_del, t) -
           ctx_.disturbance(t);
}

Vector Monitor::n_d(double t) const {
    return (s2(t + ctx_.h) - s2(t - ctx_.h)) / (2.0 * ctx_.h);
}

const MonitorRecord& Monitor::observe(const StepSnapshot& s) {
    const auto& g = ctx_.gains;
    const auto& traj = ctx_.trajectory;
    const double t = s.t;

    const Vector xd = traj.x(t);
    const Vector xd_dot = traj.xdot(t);
    const Vector xd_ddot = traj.xddot(t);

    MonitorRecord rec;
    rec.t = t;
    rec.e1 = xd - s.x;
    const Vector e1_dot = xd_dot - s.xdot;
    rec.e2 = e1_dot + g.alpha1 * rec.e1;
    const Vector e1_ddot = xd_ddot - s.xddot;
    const Vector e2_dot = e1_ddot + g.alpha1 * e1_dot;
    rec.e_u = s.u_del - s.u;
    rec.r = r_signal(e2_dot, rec.e2, rec.e_u, g);
    rec.u = s.u;

    // Integrands of the LK signals: |du/dt|^2 with du/dt = (ks + 1) r, and
    // rho2(|z|)^2 |z|^2.
    const double kp1 = g.ks + 1.0;
    LKSignals lk0;
    const CompositeState z0 = composite_state(rec.e1, rec.e2, rec.r, rec.e_u, lk0);
    rec.z_norm = z0.z.norm();
    rec.z_acute_norm = z0.z_acute.norm();
    const double r2 = ctx_.bounding.rho2(rec.z_norm);
    input_integral_.push(t, kp1 * kp1 * rec.r.squaredNorm());
    state_integral_.push(t, r2 * r2 * rec.z_norm * rec.z_norm);

    const double tau_i = ctx_.input_delay.tau(t);
    const double tau_s = ctx_.state_delay.tau(t);
    LKSignals& lk = rec.lk;
    lk.P = std::max(0.0, ctx_.bounds.phi_i1 * input_integral_.single(t - tau_i));
    lk.Q = std::max(0.0, g.omega * input_integral_.nested(t - tau_i));
    lk.R = std::max(0.0, g.gamma1 / (2.0 * g.ks) * state_integral_.single(t - tau_s));
    lk.S = std::max(0.0, g.gamma2 / g.ks * state_integral_.nested(t - tau_s));

    const CompositeState zs = composite_state(rec.e1, rec.e2, rec.r, rec.e_u, lk);
    rec.V = lyapunov(zs, lk);
    rec.y_norm = zs.y.norm();

    if (!z_history_) {
        z_history_.emplace(t, zs.z);
    } else {
        z_history_->append(t, zs.z);
    }
    rec.z_tau_norm = ctx_.state_delay.identically_zero()
                         ? rec.z_norm
                         : z_history_->eval(t - tau_s, Lookup::Delayed).norm();

    rec.N_d = n_d(t);

    // Open-loop identity r = S1 + S2 - u, evaluated with the delayed state
    // the plant actually saw.
    Vector xd_del = xd, xd_dot_del = xd_dot;
    if (!ctx_.state_delay.identically_zero()) {
        const double target = t - tau_s;
        if (target <= ctx_.t0) {
            xd_del.setZero();
            xd_dot_del.setZero();
        } else {
            xd_del = traj.x(target);
            xd_dot_del = traj.xdot(target);
        }
    }
    const auto& p = ctx_.plant;
    const Vector S1 = p.f(xd, xd_dot, t) - p.f(s.x, s.xdot, t) + p.g(xd_del, xd_dot_del, t) -
                      p.g(s.x_del, s.xdot_del, t) + g.alpha1 * e1_dot + g.alpha2 * rec.e2;
    rec.open_loop_residual = (rec.r - (S1 + s2(t) - s.u)).norm();

    input_integral_.prune(horizon_);
    state_integral_.prune(horizon_);
    z_history_->prune(horizon_);
    ++steps_;

    records_.push_back(std::move(rec));
    return records_.back();
}

std::vector<double> history_activation_times(const DelayProfile& input, const DelayProfile& state,
                                             double t0) {
    std::vector<double> out;
    for (const auto* p : {&input, &state}) {
        if (p->identically_zero()) continue;
        const double ta = history_activation_time(*p, t0);
        if (ta > t0) out.push_back(ta);
    }
    return out;
}

double estimate_zeta(const Monitor& m, double t_end, double safety) {
    const auto& ctx = m.context();
    const auto act = history_activation_times(ctx.input_delay, ctx.state_delay, ctx.t0);
    const long n = static_cast<long>(std::ceil((t_end - ctx.t0) / ctx.h));
    double best = 0.0;
    for (long k = 0; k <= n; ++k) {
        const double t = ctx.t0 + static_cast<double>(k) * ctx.h;
        const bool near = std::any_of(act.begin(), act.end(),
                                      [&](double ta) { return std::abs(t - ta) <= 2.0 * ctx.h; });
        if (!near) best = std::max(best, m.n_d(t).norm());
    }
    return best * safety;
}

// ---------------------------------------------------------------------------
// Certification

namespace {

// Relative-error floor for the du/dt check, as a fraction of max |(ks+1) r|.
constexpr double kDerivativeFloor = 1e-2;

std::string fmt_double(double v) {
    std::ostringstream os;
    os.precision(6);
    os << v;
    return os.str();
}

}  // namespace

CertificationReport certify(std::vector<MonitorRecord>& records, const CertificationInput& in) {
    CertificationReport rep;
    const auto& th = in.theorem;
    rep.samples = static_cast<long>(records.size());
    rep.ultimate_bound = th.ultimate_bound;
    rep.decay_radius = th.decay_radius;

    if (records.size() < 3) {
        rep.verdict = "inconclusive";
        rep.diagnostics.push_back("too few records for finite differences");
        return rep;
    }

    const double h = in.h;
    const double t_first = records.front().t;
    const double t_last = records.back().t;
    const double horizon = t_last - t_first;
    const double delta = th.delta;

    const std::size_t n = records.size();

    // Finite differences and exclusion windows.
    for (std::size_t i = 0; i < n; ++i) {
        auto& rec = records[i];
        for (double ta : in.activation_times) {
            if (std::abs(rec.t - ta) <= 2.0 * h) rec.excluded = true;
        }
        if (rec.excluded) ++rep.excluded_samples;
        if (i == 0 || i + 1 == n) continue;
        rec.has_fd = true;
        rec.V_dot_fd = (records[i + 1].V - records[i - 1].V) / (2.0 * h);
    }

    // Sandwich and embedding invariants at every record.
    for (auto& rec : records) {
        const double y2 = rec.y_norm * rec.y_norm;
        const double tol = 1e-9 * std::max(1.0, y2);
        if (rec.V < 0.5 * y2 - tol || rec.V > y2 + tol) ++rep.sandwich_violations;
        if (rec.z_norm > rec.y_norm * (1.0 + 1e-6) + 1e-12) ++rep.embedding_violations;
        const double eu2 = rec.e_u.squaredNorm();
        if (eu2 > rec.lk.P * (1.0 + 1e-6) + 1e-15) ++rep.eu_violations;
        if (rec.lk.P > 0.0) rep.max_eu_ratio = std::max(rep.max_eu_ratio, eu2 / rec.lk.P);
    }

    // Decay inequality outside the decay radius.
    for (auto& rec : records) {
        if (!rec.has_fd || rec.excluded) continue;
        const double y2 = rec.y_norm * rec.y_norm;
        if (rec.y_norm < th.decay_radius) continue;
        ++rep.decay_checked;
        const double tol = std::max(1e-6, 0.05 * delta * y2);
        rec.decay_ok = rec.V_dot_fd <= -delta * y2 + tol;
        if (!rec.decay_ok) ++rep.decay_violations;
    }
    if (rep.decay_checked > 0) {
        rep.decay_violation_fraction =
            static_cast<double>(rep.decay_violations) / static_cast<double>(rep.decay_checked);
    }

    // Ultimate bound.
    const double ub = th.ultimate_bound;
    const double t_half = t_first + 0.5 * horizon;
    rep.remains_after_entry = false;
    bool entered = false;
    bool stayed = true;
    for (const auto& rec : records) {
        if (!entered && rec.y_norm <= ub) {
            entered = true;
            rep.first_entry_time = rec.t;
        }
        if (entered && rec.y_norm > 1.05 * ub) stayed = false;
        if (rec.t >= t_half) {
            rep.final_half_max_y = std::max(rep.final_half_max_y, rec.y_norm);
            rep.max_e1_final_half = std::max(rep.max_e1_final_half, rec.e1.norm());
        }
        rep.max_open_loop_residual = std::max(rep.max_open_loop_residual, rec.open_loop_residual);
    }
    rep.remains_after_entry = entered && stayed;
    rep.final_half_within = rep.final_half_max_y <= 1.05 * ub;

    // Regions of attraction.
    rep.initial_in_SD = records.front().y_norm < th.radii.r_SD;
    rep.never_left_D = true;
    for (auto& rec : records) {
        rec.inside_SD = rec.y_norm < th.radii.r_SD;
        if (!(rec.y_norm < th.radii.r_D)) rep.never_left_D = false;
    }

    // Validity of the bounding data along the trajectory.
    const GainSet& g = in.gains;
    const double kp1 = g.ks + 1.0;
    rep.zeta_checked = true;
    for (const auto& rec : records) {
        if (rec.excluded) continue;
        const double nd = rec.N_d.norm();
        rep.max_nd_norm = std::max(rep.max_nd_norm, nd);
        if (nd > in.bounding.zeta_nd1 * (1.0 + 1e-9)) ++rep.zeta_violations;
    }

    // N~ = dr/dt - N_d + e2 + (ks + 1) r must satisfy
    // |N~| <= rho1(|z|)|z| + rho2(|z_tau|)|z_tau|. The identity behind it
    // assumes the controller compensates the true input delay.
    if (in.input_delay_matched) {
        rep.ntilde_checked = true;
        for (std::size_t i = 1; i + 1 < n; ++i) {
            auto& rec = records[i];
            if (rec.excluded) continue;
            const Vector r_dot = (records[i + 1].r - records[i - 1].r) / (2.0 * h);
            const Vector nt = r_dot - rec.N_d + rec.e2 + kp1 * rec.r;
            rec.Ntilde_norm = nt.norm();
            rec.Ntilde_bound = in.bounding.rho1(rec.z_norm) * rec.z_norm +
                               in.bounding.rho2(rec.z_tau_norm) * rec.z_tau_norm;
            const double scale = r_dot.norm() + rec.N_d.norm() + rec.e2.norm() + kp1 * rec.r.norm();
            const double tol = 1e-6 + 1e-4 * scale;
            if (rec.Ntilde_norm > rec.Ntilde_bound + tol) ++rep.ntilde_violations;
            if (rec.Ntilde_bound > 0.0) {
                rep.max_ntilde_ratio = std::max(rep.max_ntilde_ratio, rec.Ntilde_norm / rec.Ntilde_bound);
            }
        }

        // du/dt = (ks + 1) r.
        rep.derivative_checked = true;
        double scale = 0.0;
        for (const auto& rec : records) scale = std::max(scale, kp1 * rec.r.norm());
        const double floor = 1e-6 + kDerivativeFloor * scale;
        for (std::size_t i = 10; i + 1 < n; ++i) {
            const auto& rec = records[i];
            if (rec.excluded || records[i - 1].excluded || records[i + 1].excluded) continue;
            const Vector fd = (records[i + 1].u - records[i - 1].u) / (2.0 * h);
            const Vector exact = kp1 * rec.r;
            const double rel = (fd - exact).norm() / std::max(exact.norm(), floor);
            rep.max_derivative_rel_error = std::max(rep.max_derivative_rel_error, rel);
        }
    }

    // Verdict.
    if (horizon < 5.0 / delta) {
        rep.verdict = "inconclusive";
        rep.diagnostics.push_back("horizon " + fmt_double(horizon) + " s is shorter than 5/delta = " +
                                  fmt_double(5.0 / delta) + " s");
        return rep;
    }
    auto note = [&rep](bool bad, const std::string& msg) {
        if (bad) rep.diagnostics.push_back(msg);
        return !bad;
    };
    bool ok = true;
    ok &= note(!in.conditions_ok, "theorem conditions not satisfied");
    ok &= note(!in.input_delay_matched, "controller input delay differs from the true delay");
    ok &= note(rep.decay_violations > 0, "decay inequality violated at " +
                                             std::to_string(rep.decay_violations) + " of " +
                                             std::to_string(rep.decay_checked) + " samples");
    ok &= note(!rep.final_half_within, "|y| over the final half reaches " +
                                           fmt_double(rep.final_half_max_y) + " > 1.05 x " +
                                           fmt_double(ub));
    ok &= note(!rep.initial_in_SD, "initial |y| outside the region of attraction");
    ok &= note(!rep.never_left_D, "trajectory left the region D");
    ok &= note(rep.sandwich_violations > 0, "V outside [|y|^2/2, |y|^2] at " +
                                                std::to_string(rep.sandwich_violations) + " samples");
    ok &= note(rep.embedding_violations > 0, "|z| > |y| at " +
                                                 std::to_string(rep.embedding_violations) + " samples");
    ok &= note(rep.eu_violations > 0,
               "|e_u|^2 > P at " + std::to_string(rep.eu_violations) + " samples");
    ok &= note(rep.zeta_violations > 0,
               std::string("zeta_nd1 violated: max |N_d| = ") + fmt_double(rep.max_nd_norm) +
                   " > " + fmt_double(in.bounding.zeta_nd1) +
                   (in.zeta_estimated ? " (estimated)" : " (declared)"));
    ok &= note(rep.ntilde_violations > 0, "rho1/rho2 bound on N~ violated at " +
                                              std::to_string(rep.ntilde_violations) + " samples");
    if (in.zeta_estimated) {
        rep.diagnostics.push_back("zeta_nd1 estimated from samples, not a proven bound");
    }
    rep.verdict = ok ? "certified" : "bounded (uncertified)";
    return rep;
}

}  // namespace delaycomp
