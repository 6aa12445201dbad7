#pragma once

// File formats. Numbers are written with 17 significant digits, '.' decimal
// separator and LF line endings; column names and order are fixed.
//
// state.csv    t, x_1..x_n, xdot_1..xdot_n, xd_1..xd_n, e1_1..e1_n,
//              e2_1..e2_n, u_1..u_n, eu_1..eu_n, tau_i, tau_s
// monitor.csv  t, e1_*, e2_*, r_*, eu_*, Nd_*, z_norm, z_tau_norm, y_norm, V,
//              V_dot_fd, P, Q, R, S, decay_ok, inside_SD, Ntilde_norm,
//              Ntilde_bound, open_loop_residual
// sweep.csv    value, verdict, steady_y, max_e1, max_e1_final_half, diverged,
//              conditions_ok, error
// report.kv    key=value lines; report.txt carries the same pairs for reading.

#include "delaycomp/sim_engine.hpp"

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

namespace delaycomp {

/// "%.17g"; inf and nan as "inf", "-inf", "nan".
[[nodiscard]] std::string format_double(double v);

[[nodiscard]] std::string state_csv_header(Eigen::Index dim);
[[nodiscard]] std::string monitor_csv_header(Eigen::Index dim);
[[nodiscard]] std::string sweep_csv_header();

void write_state_csv(std::ostream& os, const std::vector<StateRow>& rows, Eigen::Index dim);
void write_monitor_csv(std::ostream& os, const std::vector<MonitorRecord>& records, Eigen::Index dim);
void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows);

using KeyValues = std::vector<std::pair<std::string, std::string>>;

/// Machine-readable summary of a run.
[[nodiscard]] KeyValues report_pairs(const SimResult& r, const SimConfig& cfg);

void write_report_kv(std::ostream& os, const KeyValues& kv);
/// Human-readable report: headline, conditions, then the same key/value pairs.
void write_report_txt(std::ostream& os, const SimResult& r, const KeyValues& kv);

/// Per-condition table used by check-gains and report.txt.
void write_condition_table(std::ostream& os, const TheoremCheck& th);

}  // namespace delaycomp
