#pragma once

// Analysis-side reconstruction of the composite error state and the
// Lyapunov-Krasovskii signals along a simulated trajectory, and the numerical
// certification of the stability claims (sandwich bound, decay inequality,
// ultimate bound, bound validity) over the recorded samples.
//
// The monitor is omniscient: it reads the true delays, the plant internals and
// the simulated acceleration. Nothing here feeds back into the controller.

#include "delaycomp/delay_profile.hpp"
#include "delaycomp/gain_synthesis.hpp"
#include "delaycomp/plant.hpp"
#include "delaycomp/trajectory_history.hpp"
#include "delaycomp/types.hpp"

#include <deque>
#include <optional>
#include <string>
#include <vector>

namespace delaycomp {

/// r = de2/dt + alpha2 e2 + e_u
[[nodiscard]] Vector r_signal(const Vector& e2_dot, const Vector& e2, const Vector& e_u,
                              const GainSet& g);

/// z = [e1; e2; r; e_u], z_acute = [e1; e2; r], y = [z_acute; sqrt P; sqrt Q; sqrt R; sqrt S].
struct CompositeState {
    Vector z;
    Vector z_acute;
    Vector y;
};

struct LKSignals {
    double P = 0.0;
    double Q = 0.0;
    double R = 0.0;
    double S = 0.0;

    [[nodiscard]] double sum() const { return P + Q + R + S; }
};

[[nodiscard]] CompositeState composite_state(const Vector& e1, const Vector& e2, const Vector& r,
                                             const Vector& e_u, const LKSignals& lk);

/// 1/2 |z_acute|^2 + P + Q + R + S
[[nodiscard]] double lyapunov(const CompositeState& zs, const LKSignals& lk);

/// Running trapezoid integral of a nonnegative integrand w sampled at
/// increasing times from t0, with w = 0 before t0. Answers, for the newest
/// time t and a lower limit a,
///   single(a) = int_a^t w
///   nested(a) = int_a^t (int_s^t w) ds = (t - a) U(t) - int_a^t U(s) ds
/// where U is the cumulative integral. The outer integral is the trapezoid
/// rule over {a, sample times in (a, t]}. Storage is pruned to a horizon and
/// the cumulative sums are rebased on pruning to keep them at window scale.
class CumulativeIntegral {
public:
    explicit CumulativeIntegral(double t0);

    void push(double t, double w);
    [[nodiscard]] double single(double a) const;
    [[nodiscard]] double nested(double a) const;
    void prune(double horizon);

    [[nodiscard]] double t0() const noexcept { return t0_; }
    [[nodiscard]] double last_time() const { return nodes_.back().t; }
    [[nodiscard]] std::size_t size() const noexcept { return nodes_.size(); }

private:
    struct Node {
        double t;
        double w;
        double U;  ///< int_{ref}^t w
        double W;  ///< trapezoid sum of U from ref to t
    };
    struct Partial {
        std::size_t next;  ///< index of first node strictly after a
        double U_a;
    };
    [[nodiscard]] Partial locate(double a) const;

    double t0_;
    std::deque<Node> nodes_;
};

/// Per-sample analysis record. Fields after `open_loop_residual` are filled by
/// certify().
struct MonitorRecord {
    double t = 0.0;
    Vector e1, e2, r, e_u, u, N_d;
    double z_norm = 0.0;
    double z_tau_norm = 0.0;  ///< |z(t - tau_s)| under the zero-history convention
    double z_acute_norm = 0.0;
    LKSignals lk;
    double V = 0.0;
    double y_norm = 0.0;
    double open_loop_residual = 0.0;  ///< |r - (S1 + S2 - u)|

    double V_dot_fd = 0.0;
    bool has_fd = false;
    bool excluded = false;  ///< finite-difference stencil touches a history activation instant
    bool decay_ok = true;
    bool inside_SD = true;
    double Ntilde_norm = 0.0;
    double Ntilde_bound = 0.0;
};

struct MonitorContext {
    PlantDynamics plant;
    DesiredTrajectory trajectory;
    Disturbance disturbance;
    DelayProfile input_delay;  ///< true input delay
    DelayProfile state_delay;  ///< true state delay
    GainSet gains;
    DelayBounds bounds;
    BoundingData bounding;
    double t0 = 0.0;
    double h = 1e-3;
};

/// What the simulation hands the monitor at a step boundary.
struct StepSnapshot {
    double t = 0.0;
    Vector x, xdot, xddot;
    Vector x_del, xdot_del;  ///< state at t - tau_s as fed to the plant
    Vector u;
    Vector u_del;            ///< u at t - tau_i (true delay)
};

class Monitor {
public:
    explicit Monitor(MonitorContext ctx);

    /// Computes the record for one step boundary and appends it.
    const MonitorRecord& observe(const StepSnapshot& s);

    /// S2 = xddot_d - f(x_d, xdot_d) - g(x_d(t - tau_s), xdot_d(t - tau_s)) - d
    [[nodiscard]] Vector s2(double t) const;
    /// Central difference of S2 with step h.
    [[nodiscard]] Vector n_d(double t) const;

    [[nodiscard]] const std::vector<MonitorRecord>& records() const noexcept { return records_; }
    [[nodiscard]] std::vector<MonitorRecord>& records() noexcept { return records_; }
    [[nodiscard]] const MonitorContext& context() const noexcept { return ctx_; }

private:
    MonitorContext ctx_;
    CumulativeIntegral input_integral_;
    CumulativeIntegral state_integral_;
    std::optional<SampleBuffer> z_history_;
    double horizon_;
    long steps_ = 0;
    std::vector<MonitorRecord> records_;
};

/// Instants after t0 where t - tau(t) = t0 for each nonzero delay: delayed
/// reads leave the zero history there and the delayed signals may jump.
[[nodiscard]] std::vector<double> history_activation_times(const DelayProfile& input,
                                                           const DelayProfile& state, double t0);

/// Largest sampled |N_d| over [t0, t_end] times `safety`, for configurations
/// that do not declare zeta_nd1. Samples within 2h of an activation instant
/// are skipped, since N_d is a finite-difference spike there.
[[nodiscard]] double estimate_zeta(const Monitor& m, double t_end, double safety = 1.1);

struct CertificationInput {
    TheoremCheck theorem;
    GainSet gains;
    BoundingData bounding;
    double h = 1e-3;
    std::vector<double> activation_times;  ///< instants where delayed reads leave the zero history
    bool zeta_estimated = false;
    bool input_delay_matched = true;       ///< controller uses the true input delay
    bool conditions_ok = false;            ///< theorem conditions and delay validation
};

struct CertificationReport {
    std::string verdict;  ///< "certified", "bounded (uncertified)", "inconclusive", "diverged"
    std::vector<std::string> diagnostics;

    long samples = 0;
    long excluded_samples = 0;
    long decay_checked = 0;
    long decay_violations = 0;
    double decay_violation_fraction = 0.0;

    double ultimate_bound = 0.0;
    double decay_radius = 0.0;
    double first_entry_time = kInfinity;  ///< first time |y| <= ultimate bound
    bool remains_after_entry = false;     ///< |y| <= 1.05 bound from first entry on
    double final_half_max_y = 0.0;
    bool final_half_within = false;       ///< |y| <= 1.05 bound over the final 50%

    bool initial_in_SD = false;
    bool never_left_D = false;

    long sandwich_violations = 0;
    long embedding_violations = 0;  ///< |z| > |y|
    long eu_violations = 0;         ///< |e_u|^2 > P_LK
    double max_eu_ratio = 0.0;      ///< max |e_u|^2 / P_LK

    bool zeta_checked = false;
    long zeta_violations = 0;
    double max_nd_norm = 0.0;

    bool ntilde_checked = false;
    long ntilde_violations = 0;
    double max_ntilde_ratio = 0.0;  ///< max |N~| / bound

    bool derivative_checked = false;
    double max_derivative_rel_error = 0.0;  ///< finite-difference du/dt vs (ks+1) r

    double max_open_loop_residual = 0.0;
    double max_e1_final_half = 0.0;

    [[nodiscard]] bool certified() const { return verdict == "certified"; }
};

/// Post-pass over uniformly spaced records. Fills the finite-difference fields
/// of each record and returns the verdict.
[[nodiscard]] CertificationReport certify(std::vector<MonitorRecord>& records,
                                          const CertificationInput& in);

}  // namespace delaycomp
