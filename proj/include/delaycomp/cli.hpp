#pragma once

// Command-line front end. Exit codes: 0 success, 1 theorem condition failure
// (check-gains), 2 usage or configuration error, 3 numerical divergence.
//
//   delaycomp check-gains CONFIG
//   delaycomp simulate CONFIG [--out DIR] [--no-monitor]
//   delaycomp sweep CONFIG --axis KEY --values V1,V2,... [--out DIR]

#include <iosfwd>
#include <string>
#include <vector>

namespace delaycomp::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConditions = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitDiverged = 3;

int check_gains(const std::string& config, std::ostream& out, std::ostream& err);
int simulate(const std::string& config, const std::string& out_dir, bool no_monitor,
             std::ostream& out, std::ostream& err);
int sweep(const std::string& config, const std::string& axis, const std::string& values,
          const std::string& out_dir, std::ostream& out, std::ostream& err);

/// Parses "a,b,c" into numbers. Throws ConfigError on an empty list or a bad
/// entry.
[[nodiscard]] std::vector<double> parse_value_list(const std::string& text);

/// Full argument handling; argv[0] is the program name.
int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace delaycomp::cli
