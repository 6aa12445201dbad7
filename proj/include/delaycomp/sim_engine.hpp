#pragma once

// Fixed-step RK4 integration of the closed loop
//
//   xddot = f(x, xdot, t) + g(x(t - tau_s), xdot(t - tau_s), t) + d(t) + u(t - tau_i)
//   dv/dt = (ks + 1)(alpha2 e2 + e_u)
//
// with delayed reads interpolated from step-boundary histories (zero before
// t0). The monitor and the certification pass run alongside when enabled.

#include "delaycomp/controller.hpp"
#include "delaycomp/delay_profile.hpp"
#include "delaycomp/gain_synthesis.hpp"
#include "delaycomp/lk_monitor.hpp"
#include "delaycomp/plant.hpp"
#include "delaycomp/types.hpp"

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace delaycomp {

struct SimConfig {
    double t0 = 0.0;
    double t_end = 10.0;
    double h = 1e-3;

    PlantDynamics plant = builtin_scalar();
    DesiredTrajectory trajectory = DesiredTrajectory::hold(Vector::Zero(1));
    Disturbance disturbance = Disturbance::none(1);

    DelayProfile input_delay = DelayProfile::constant(0.0);  ///< true
    DelayProfile state_delay = DelayProfile::constant(0.0);  ///< true
    double input_delay_scale = 1.0;  ///< controller uses input_delay.scaled(scale)

    GainSet gains;
    BoundingData bounding = BoundingData::constant(0.0, 0.0, 0.0);

    bool monitor_enabled = true;
    std::uint64_t seed = 1;
    Vector initial_x = Vector::Zero(1);
    Vector initial_xdot = Vector::Zero(1);
    double init_jitter = 0.0;  ///< std-dev of seeded Gaussian perturbation of the initial state

    /// Throws PreconditionError on inconsistent dimensions or bad times.
    void validate() const;
};

/// phi bounds as declared by the true delay profiles.
[[nodiscard]] DelayBounds delay_bounds(const SimConfig& cfg);

struct StateRow {
    double t = 0.0;
    Vector x, xdot, xd, e1, e2, u, e_u;  ///< e_u as the controller sees it
    double tau_i = 0.0;
    double tau_s = 0.0;
};

struct SimResult {
    std::vector<StateRow> rows;
    std::vector<MonitorRecord> monitor;
    std::optional<CertificationReport> report;

    TheoremCheck theorem;
    DelayValidation input_validation;
    DelayValidation state_validation;
    bool conditions_ok = false;
    double zeta_used = 0.0;
    bool zeta_estimated = false;

    bool diverged = false;
    std::string divergence_message;
    LookupStats lookups;
    bool reduced_order = false;  ///< some delayed read was clamped to the newest sample

    double max_e1 = 0.0;
    double max_e1_final_half = 0.0;

    /// "certified", "bounded (uncertified)", "inconclusive", "diverged" or
    /// "completed" when the monitor is off.
    [[nodiscard]] std::string verdict() const;
    [[nodiscard]] std::vector<std::string> labels() const;
};

/// Copy of cfg with zeta_nd1 filled in from sampled |N_d| when the bounding
/// data asks for an estimate; otherwise cfg unchanged.
[[nodiscard]] SimConfig resolve_zeta(SimConfig cfg);

/// One closed-loop run. Never throws for gain-condition failures; those are
/// reported through conditions_ok. Divergence stops the run and keeps the
/// rows produced so far.
[[nodiscard]] SimResult run(SimConfig cfg);

struct SweepRow {
    double value = 0.0;
    std::string verdict;
    double steady_y = 0.0;  ///< max |y| over the final half (NaN without monitor)
    double max_e1 = 0.0;
    double max_e1_final_half = 0.0;
    bool diverged = false;
    bool conditions_ok = false;
    std::string error;  ///< non-empty when the run could not be set up
};

/// Worker count for sweeps: hardware concurrency capped by DELAYCOMP_THREADS.
[[nodiscard]] unsigned sweep_threads();

/// One run per value, distributed over `threads` workers. Rows come back in
/// input order. A failure in one run is recorded in its row.
[[nodiscard]] std::vector<SweepRow> sweep(const std::vector<double>& values,
                                          const std::function<SimConfig(double)>& make,
                                          unsigned threads = sweep_threads());

}  // namespace delaycomp
