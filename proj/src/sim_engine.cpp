#include "delaycomp/sim_engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <random>
#include <thread>

namespace delaycomp {

namespace {

constexpr double kDivergenceNorm = 1e9;

void require_dim(const Vector& v, Eigen::Index n, const char* what) {
    if (v.size() != n) {
        throw PreconditionError(std::string("SimConfig: ") + what + " has dimension " +
                                std::to_string(v.size()) + ", plant has " + std::to_string(n));
    }
}

}  // namespace

void SimConfig::validate() const {
    if (!(h > 0.0) || !std::isfinite(h)) throw PreconditionError("SimConfig: h must be positive");
    if (!(t_end > t0)) throw PreconditionError("SimConfig: t_end must exceed t0");
    if (!(input_delay_scale >= 0.0)) throw PreconditionError("SimConfig: input_delay_scale must be >= 0");
    if (!(init_jitter >= 0.0)) throw PreconditionError("SimConfig: init_jitter must be >= 0");
    const auto n = plant.dim;
    require_dim(initial_x, n, "initial_x");
    require_dim(initial_xdot, n, "initial_xdot");
    if (trajectory.dim() != n) throw PreconditionError("SimConfig: trajectory dimension differs from plant");
    if (disturbance.dim() != n) throw PreconditionError("SimConfig: disturbance dimension differs from plant");
    gains.validate();
}

DelayBounds delay_bounds(const SimConfig& cfg) {
    return {cfg.input_delay.phi1(), cfg.input_delay.phi2(), cfg.state_delay.phi1(),
            cfg.state_delay.phi2()};
}

std::string SimResult::verdict() const {
    if (diverged) return "diverged";
    if (report) return report->verdict;
    return "completed";
}

std::vector<std::string> SimResult::labels() const {
    std::vector<std::string> out;
    out.push_back(conditions_ok ? "conditions satisfied" : "conditions not satisfied");
    if (reduced_order) out.push_back("reduced-order accuracy");
    if (zeta_estimated) out.push_back("zeta estimated");
    return out;
}

namespace {

struct Derivs {
    Vector xdot, xddot, vdot;
};

struct StageEval {
    Derivs d;
    Vector xd, e1, e2, u, u_del, x_del, xdot_del, e_u_hat;
};

class Engine {
public:
    explicit Engine(const SimConfig& cfg)
        : cfg_(cfg),
          n_(cfg.plant.dim),
          controller_(ControllerConfig{cfg.gains.alpha1, cfg.gains.alpha2, cfg.gains.ks,
                                       cfg.input_delay.scaled(cfg.input_delay_scale)},
                      cfg.t0, cfg.plant.dim),
          x_hist_(cfg.t0, cfg.initial_x),
          xdot_hist_(cfg.t0, cfg.initial_xdot) {
        const auto& ci = controller_.config().input_delay;
        const SamplingGrid grid{cfg.t0, cfg.t_end};
        horizon_ = std::max({cfg.input_delay.phi1(), cfg.state_delay.phi1(), ci.phi1(),
                             sampled_max_tau(cfg.input_delay, grid),
                             sampled_max_tau(cfg.state_delay, grid), sampled_max_tau(ci, grid)}) +
                   4.0 * cfg.h;
    }

    StageEval stage(double t, const Vector& x, const Vector& xdot, const Vector& v) {
        StageEval s;
        const auto& traj = cfg_.trajectory;
        s.xd = traj.x(t);
        const auto err = controller_.errors(x, xdot, s.xd, traj.xdot(t));
        s.e1 = err.e1;
        s.e2 = err.e2;
        s.u = controller_.control(err.e2, v);

        const auto& ti = cfg_.input_delay;
        const auto& ts = cfg_.state_delay;
        s.u_del = delayed_value(controller_.state().u_history, t, ti.tau(t), ti.identically_zero(),
                                s.u, &stats_);
        const double tau_s = ts.tau(t);
        s.x_del = delayed_value(x_hist_, t, tau_s, ts.identically_zero(), x, &stats_);
        s.xdot_del = delayed_value(xdot_hist_, t, tau_s, ts.identically_zero(), xdot, &stats_);

        s.e_u_hat = controller_.input_mismatch(t, s.u, &stats_);
        s.d.xdot = xdot;
        s.d.xddot = accel(cfg_.plant, x, xdot, s.x_del, s.xdot_del, cfg_.disturbance(t), s.u_del, t);
        s.d.vdot = controller_.v_rate(err.e2, s.e_u_hat);
        return s;
    }

    SimResult run() {
        SimResult res;
        const double t0 = cfg_.t0;
        const double h = cfg_.h;
        const long steps = static_cast<long>(std::llround((cfg_.t_end - t0) / h));

        std::optional<Monitor> monitor;
        if (cfg_.monitor_enabled) {
            monitor.emplace(MonitorContext{cfg_.plant, cfg_.trajectory, cfg_.disturbance,
                                           cfg_.input_delay, cfg_.state_delay, cfg_.gains,
                                           delay_bounds(cfg_), cfg_.bounding, t0, h});
        }

        Vector x = cfg_.initial_x;
        Vector xdot = cfg_.initial_xdot;
        Vector v = Vector::Zero(n_);

        // Freeze e2(t0); u(t0) = 0 matches the seeded history.
        {
            const auto err = controller_.errors(x, xdot, cfg_.trajectory.x(t0), cfg_.trajectory.xdot(t0));
            (void)controller_.control(err.e2);
        }

        double t = t0;
        StageEval k1;
        try {
            k1 = stage(t, x, xdot, v);
        } catch (const DivergenceError& e) {
            res.diverged = true;
            res.divergence_message = e.what();
            return res;
        }
        record(res, monitor, t, x, xdot, k1);

        for (long k = 1; k <= steps; ++k) {
            const double t_next = t0 + static_cast<double>(k) * h;
            try {
                const StageEval k2 = stage(t + 0.5 * h, x + 0.5 * h * k1.d.xdot,
                                           xdot + 0.5 * h * k1.d.xddot, v + 0.5 * h * k1.d.vdot);
                const StageEval k3 = stage(t + 0.5 * h, x + 0.5 * h * k2.d.xdot,
                                           xdot + 0.5 * h * k2.d.xddot, v + 0.5 * h * k2.d.vdot);
                const StageEval k4 = stage(t + h, x + h * k3.d.xdot, xdot + h * k3.d.xddot,
                                           v + h * k3.d.vdot);
                x += h / 6.0 * (k1.d.xdot + 2.0 * k2.d.xdot + 2.0 * k3.d.xdot + k4.d.xdot);
                xdot += h / 6.0 * (k1.d.xddot + 2.0 * k2.d.xddot + 2.0 * k3.d.xddot + k4.d.xddot);
                v += h / 6.0 * (k1.d.vdot + 2.0 * k2.d.vdot + 2.0 * k3.d.vdot + k4.d.vdot);

                const double size = std::sqrt(x.squaredNorm() + xdot.squaredNorm() + v.squaredNorm());
                if (!all_finite(x) || !all_finite(xdot) || !all_finite(v) || size > kDivergenceNorm) {
                    char msg[96];
                    std::snprintf(msg, sizeof msg, "state norm exceeded %g at t = %.6g", kDivergenceNorm, t_next);
                    throw DivergenceError(msg);
                }

                t = t_next;
                const auto err =
                    controller_.errors(x, xdot, cfg_.trajectory.x(t), cfg_.trajectory.xdot(t));
                const Vector u = controller_.control(err.e2, v);
                controller_.commit(t, v, u);
                x_hist_.append(t, x);
                xdot_hist_.append(t, xdot);
                controller_.prune(horizon_);
                x_hist_.prune(horizon_);
                xdot_hist_.prune(horizon_);

                // Boundary evaluation doubles as the next step's first stage.
                k1 = stage(t, x, xdot, v);
            } catch (const DivergenceError& e) {
                res.diverged = true;
                res.divergence_message = e.what();
                break;
            }
            record(res, monitor, t, x, xdot, k1);
        }

        res.lookups = stats_;
        res.reduced_order = stats_.clamped > 0;
        if (monitor) res.monitor = std::move(monitor->records());
        return res;
    }

private:
    void record(SimResult& res, std::optional<Monitor>& monitor, double t, const Vector& x,
                const Vector& xdot, const StageEval& s) {
        StateRow row;
        row.t = t;
        row.x = x;
        row.xdot = xdot;
        row.xd = s.xd;
        row.e1 = s.e1;
        row.e2 = s.e2;
        row.u = s.u;
        row.e_u = s.e_u_hat;
        row.tau_i = cfg_.input_delay.tau(t);
        row.tau_s = cfg_.state_delay.tau(t);
        res.rows.push_back(std::move(row));
        if (monitor) {
            monitor->observe(StepSnapshot{t, x, xdot, s.d.xddot, s.x_del, s.xdot_del, s.u, s.u_del});
        }
    }

    const SimConfig& cfg_;
    Eigen::Index n_;
    Controller controller_;
    SampleBuffer x_hist_;
    SampleBuffer xdot_hist_;
    LookupStats stats_;
    double horizon_ = 0.0;
};

}  // namespace

SimConfig resolve_zeta(SimConfig cfg) {
    if (!cfg.bounding.zeta_estimated) return cfg;
    const Monitor probe(MonitorContext{cfg.plant, cfg.trajectory, cfg.disturbance, cfg.input_delay,
                                       cfg.state_delay, cfg.gains, delay_bounds(cfg), cfg.bounding,
                                       cfg.t0, cfg.h});
    cfg.bounding.zeta_nd1 = estimate_zeta(probe, cfg.t_end);
    return cfg;
}

SimResult run(SimConfig cfg) {
    cfg.validate();

    if (cfg.init_jitter > 0.0) {
        std::mt19937_64 rng(cfg.seed);
        std::normal_distribution<double> normal(0.0, cfg.init_jitter);
        for (Eigen::Index i = 0; i < cfg.initial_x.size(); ++i) cfg.initial_x[i] += normal(rng);
        for (Eigen::Index i = 0; i < cfg.initial_xdot.size(); ++i) cfg.initial_xdot[i] += normal(rng);
    }

    const DelayBounds bounds = delay_bounds(cfg);
    const SamplingGrid grid{cfg.t0, cfg.t_end};

    cfg = resolve_zeta(std::move(cfg));

    Engine engine(cfg);
    SimResult res = engine.run();

    res.zeta_used = cfg.bounding.zeta_nd1;
    res.zeta_estimated = cfg.bounding.zeta_estimated;
    res.input_validation = validate_input_delay(cfg.input_delay, grid);
    res.state_validation = validate_state_delay(cfg.state_delay, grid);
    bool bounds_ok = true;
    try {
        bounds.validate();
        res.theorem = evaluate_conditions(cfg.gains, bounds, cfg.bounding);
    } catch (const PreconditionError&) {
        bounds_ok = false;
    }
    res.conditions_ok = bounds_ok && res.theorem.all_passed() && res.input_validation.passed() &&
                        res.state_validation.passed();

    const double t_half = cfg.t0 + 0.5 * (cfg.t_end - cfg.t0);
    for (const auto& row : res.rows) {
        const double e = row.e1.norm();
        res.max_e1 = std::max(res.max_e1, e);
        if (row.t >= t_half) res.max_e1_final_half = std::max(res.max_e1_final_half, e);
    }

    if (cfg.monitor_enabled && !res.diverged && bounds_ok) {
        CertificationInput in;
        in.theorem = res.theorem;
        in.gains = cfg.gains;
        in.bounding = cfg.bounding;
        in.h = cfg.h;
        in.activation_times = history_activation_times(cfg.input_delay, cfg.state_delay, cfg.t0);
        in.zeta_estimated = cfg.bounding.zeta_estimated;
        in.input_delay_matched = cfg.input_delay_scale == 1.0;
        in.conditions_ok = res.conditions_ok;
        res.report = certify(res.monitor, in);
    }
    return res;
}

unsigned sweep_threads() {
    unsigned n = std::max(1u, std::thread::hardware_concurrency());
    if (const char* env = std::getenv("DELAYCOMP_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end != env && cap > 0) n = std::min(n, static_cast<unsigned>(cap));
    }
    return n;
}

std::vector<SweepRow> sweep(const std::vector<double>& values,
                            const std::function<SimConfig(double)>& make, unsigned threads) {
    std::vector<SweepRow> rows(values.size());
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < values.size(); i = next++) {
            SweepRow& row = rows[i];
            row.value = values[i];
            try {
                const SimResult r = run(make(values[i]));
                row.verdict = r.verdict();
                row.diverged = r.diverged;
                row.conditions_ok = r.conditions_ok;
                row.max_e1 = r.max_e1;
                row.max_e1_final_half = r.max_e1_final_half;
                row.steady_y = r.report ? r.report->final_half_max_y
                                        : std::numeric_limits<double>::quiet_NaN();
            } catch (const std::exception& e) {
                row.verdict = "error";
                row.error = e.what();
                row.steady_y = std::numeric_limits<double>::quiet_NaN();
            }
        }
    };

    const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(values.size())));
    std::vector<std::thread> pool;
    for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
    worker();
    for (auto& th : pool) th.join();
    return rows;
}

}  // namespace delaycomp
