#pragma once

// Scenario files: a small TOML-style format.
//
//   # comment
//   [section]            or [section.sub]
//   key = 1.5            numbers
//   key = "text"         strings
//   key = true           booleans
//   key = [1, 2.5, -3]   numeric arrays (single line)
//
// Sections and keys (units in brackets):
//
//   [sim]            t0, t_end, h [s]; initial_x, initial_xdot (arrays, plant
//                    dimension); monitor (bool, default true); seed (integer);
//                    init_jitter (std-dev of a seeded Gaussian perturbation of
//                    the initial state, default 0)
//   [plant]          name ("scalar", "twolink", "linear", "zero"); coeffs (array)
//   [trajectory]     offset, amplitude, frequency [rad/s], phase [rad] (arrays);
//                    omitted means x_d = 0
//   [disturbance]    amplitude (array), frequency [rad/s], phase (array)
//   [delays.input]   kind ("constant", "sinusoidal", "table"); params [s, s, rad/s];
//   [delays.state]   phi1 [s], phi2 [-]; times, values for tables.
//                    Omitted sections mean zero delay.
//   [gains]          alpha1, alpha2, ks, gamma1, gamma2, omega
//   [controller]     input_delay_scale (controller's estimate = scale x true delay)
//   [bounding]       rho1, rho2 ([intercept, slope] of affine bounds);
//                    rho_bar (optional; derived when both slopes are 0);
//                    zeta_nd1, or zeta_mode = "estimate"
//   [output]         dir; monitor_csv (bool); report_kv (bool)
//
// Unknown sections or keys, wrong value types and missing required keys are
// rejected with the offending line number.

#include "delaycomp/sim_engine.hpp"

#include <map>
#include <string>
#include <variant>
#include <vector>

namespace delaycomp {

struct ConfigValue {
    std::variant<double, bool, std::string, std::vector<double>> value;
    int line = 0;
};

/// Flat "section.key" -> value map.
using ConfigTable = std::map<std::string, ConfigValue>;

struct Scenario {
    SimConfig sim;
    std::string output_dir = "out";
    bool write_monitor_csv = true;
    bool write_report_kv = true;
    std::string source;  ///< file path or "<string>"
    ConfigTable table;   ///< parsed values, kept for overrides
};

/// Parses the text into a table. Throws ConfigError with a line number.
[[nodiscard]] ConfigTable parse_config(const std::string& text);

/// Builds a scenario from a table. Throws ConfigError.
[[nodiscard]] Scenario build_scenario(const ConfigTable& table, std::string source = "<string>");

[[nodiscard]] Scenario parse_scenario(const std::string& text, std::string source = "<string>");

/// Reads and parses a file. A missing or unreadable file is a ConfigError.
[[nodiscard]] Scenario load_scenario(const std::string& path);

/// Keys accepted by with_override (numeric scalars only).
[[nodiscard]] std::vector<std::string> sweepable_keys();
[[nodiscard]] bool is_sweepable(const std::string& key);

/// Copy of `base` with one numeric key replaced. Throws ConfigError for keys
/// that are not sweepable or values that make the scenario invalid.
[[nodiscard]] Scenario with_override(const Scenario& base, const std::string& key, double value);

}  // namespace delaycomp
