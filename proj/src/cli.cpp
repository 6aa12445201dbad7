#include "delaycomp/cli.hpp"

#include "delaycomp/output.hpp"
#include "delaycomp/scenario.hpp"

#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace delaycomp::cli {

namespace fs = std::filesystem;

namespace {

std::ofstream open_out(const fs::path& p) {
    std::ofstream os(p, std::ios::binary);
    if (!os) throw ConfigError("cannot write '" + p.string() + "'");
    return os;
}

void print_validation(std::ostream& out, const char* which, const DelayValidation& v) {
    for (const auto& c : v.checks) {
        out << "  " << (c.passed ? "pass" : "FAIL") << "  " << which << " delay: " << c.condition;
        if (!c.passed) out << "  (at t = " << format_double(c.witness_time) << ", value " << format_double(c.value) << ")";
        out << '\n';
    }
}

}  // namespace

std::vector<double> parse_value_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        const auto b = item.find_first_not_of(" \t");
        const auto e = item.find_last_not_of(" \t");
        if (b == std::string::npos) throw ConfigError("empty entry in value list '" + text + "'");
        const std::string t = item.substr(b, e - b + 1);
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(t, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != t.size()) throw ConfigError("'" + t + "' is not a number");
        out.push_back(v);
    }
    if (out.empty()) throw ConfigError("value list is empty");
    return out;
}

int check_gains(const std::string& config, std::ostream& out, std::ostream& err) {
    try {
        const Scenario sc = load_scenario(config);
        const SimConfig cfg = resolve_zeta(sc.sim);
        const DelayBounds d = delay_bounds(cfg);
        const SamplingGrid grid{cfg.t0, cfg.t_end};
        const auto vi = validate_input_delay(cfg.input_delay, grid);
        const auto vs = validate_state_delay(cfg.state_delay, grid);

        out << "delay profiles:\n";
        print_validation(out, "input", vi);
        print_validation(out, "state", vs);
        try {
            d.validate();
        } catch (const PreconditionError& e) {
            out << "  FAIL  " << e.what() << '\n';
            return kExitConditions;
        }

        const TheoremCheck th = evaluate_conditions(cfg.gains, d, cfg.bounding);
        out << "conditions:\n";
        write_condition_table(out, th);
        out << "sigma = " << format_double(th.sigma) << '\n';
        out << "delta = " << format_double(th.delta) << '\n';
        out << "zeta_nd1 = " << format_double(cfg.bounding.zeta_nd1)
            << (cfg.bounding.zeta_estimated ? " (estimated)" : " (declared)") << '\n';
        out << "ultimate bound = " << format_double(th.ultimate_bound) << '\n';
        out << "decay radius = " << format_double(th.decay_radius) << '\n';
        out << "r_D = " << format_double(th.radii.r_D) << ", r_SD = " << format_double(th.radii.r_SD) << '\n';
        out << "regime: " << (th.global() ? "global (Remark 2)" : "semi-global") << '\n';

        const bool ok = th.all_passed() && vi.passed() && vs.passed();
        out << (ok ? "all conditions satisfied" : "conditions not satisfied") << '\n';
        return ok ? kExitOk : kExitConditions;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PreconditionError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    }
}

int simulate(const std::string& config, const std::string& out_dir, bool no_monitor,
             std::ostream& out, std::ostream& err) {
    try {
        Scenario sc = load_scenario(config);
        if (no_monitor) sc.sim.monitor_enabled = false;
        const fs::path dir = out_dir.empty() ? fs::path(sc.output_dir) : fs::path(out_dir);
        fs::create_directories(dir);

        const SimResult r = run(sc.sim);
        const auto dim = sc.sim.plant.dim;
        {
            auto os = open_out(dir / "state.csv");
            write_state_csv(os, r.rows, dim);
        }
        if (sc.sim.monitor_enabled && sc.write_monitor_csv) {
            auto os = open_out(dir / "monitor.csv");
            write_monitor_csv(os, r.monitor, dim);
        }
        const KeyValues kv = report_pairs(r, sc.sim);
        {
            auto os = open_out(dir / "report.txt");
            write_report_txt(os, r, kv);
        }
        if (sc.write_report_kv) {
            auto os = open_out(dir / "report.kv");
            write_report_kv(os, kv);
        }

        out << "verdict: " << r.verdict() << '\n';
        for (const auto& l : r.labels()) out << "label: " << l << '\n';
        if (r.report) {
            for (const auto& dgn : r.report->diagnostics) out << "diagnostic: " << dgn << '\n';
        }
        out << "wrote " << dir.string() << '\n';
        if (r.diverged) {
            err << "diverged: " << r.divergence_message << '\n';
            return kExitDiverged;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const PreconditionError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "output error: " << e.what() << '\n';
        return kExitUsage;
    }
}

int sweep(const std::string& config, const std::string& axis, const std::string& values,
          const std::string& out_dir, std::ostream& out, std::ostream& err) {
    try {
        const Scenario sc = load_scenario(config);
        if (!is_sweepable(axis)) {
            err << "unknown sweep axis '" << axis << "'; sweepable keys:";
            for (const auto& k : sweepable_keys()) err << ' ' << k;
            err << '\n';
            return kExitUsage;
        }
        const auto vals = parse_value_list(values);
        const fs::path dir = out_dir.empty() ? fs::path(sc.output_dir) : fs::path(out_dir);
        fs::create_directories(dir);

        const auto rows = delaycomp::sweep(vals, [&](double v) { return with_override(sc, axis, v).sim; });
        {
            auto os = open_out(dir / "sweep.csv");
            write_sweep_csv(os, rows);
        }
        for (const auto& r : rows) {
            out << axis << " = " << format_double(r.value) << ": " << r.verdict;
            if (!r.error.empty()) out << " (" << r.error << ")";
            out << '\n';
        }
        out << "wrote " << (dir / "sweep.csv").string() << '\n';
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const fs::filesystem_error& e) {
        err << "output error: " << e.what() << '\n';
        return kExitUsage;
    }
}

int main(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"Delay-compensating tracking controller: gain checks, simulation, sweeps"};
    app.require_subcommand(1);

    std::string config, out_dir, axis, values;
    bool no_monitor = false;

    auto* gains_cmd = app.add_subcommand("check-gains", "Evaluate the stability conditions for a scenario");
    gains_cmd->add_option("config", config, "Scenario file")->required();

    auto* sim_cmd = app.add_subcommand("simulate", "Run a scenario and write CSV and report files");
    sim_cmd->add_option("config", config, "Scenario file")->required();
    sim_cmd->add_option("--out", out_dir, "Output directory (default: [output] dir)");
    sim_cmd->add_flag("--no-monitor", no_monitor, "Skip the monitor and certification");

    auto* sweep_cmd = app.add_subcommand("sweep", "Run a scenario once per value of one numeric key");
    sweep_cmd->add_option("config", config, "Scenario file")->required();
    sweep_cmd->add_option("--axis", axis, "Config key, e.g. controller.input_delay_scale")->required();
    sweep_cmd->add_option("--values", values, "Comma-separated values")->required();
    sweep_cmd->add_option("--out", out_dir, "Output directory (default: [output] dir)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitUsage;
    }

    if (*gains_cmd) return check_gains(config, out, err);
    if (*sim_cmd) return simulate(config, out_dir, no_monitor, out, err);
    if (*sweep_cmd) return sweep(config, axis, values, out_dir, out, err);
    return kExitUsage;
}

}  // namespace delaycomp::cli
