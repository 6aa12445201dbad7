#include "delaycomp/output.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>

namespace delaycomp {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

void indexed(std::string& out, const char* stem, Eigen::Index n) {
    for (Eigen::Index k = 1; k <= n; ++k) {
        out += ',';
        out += stem;
        out += '_';
        out += std::to_string(k);
    }
}

void put(std::ostream& os, double v) { os << ',' << format_double(v); }

void put(std::ostream& os, const Vector& v) {
    for (Eigen::Index k = 0; k < v.size(); ++k) put(os, v[k]);
}

const char* yes_no(bool b) { return b ? "yes" : "no"; }

}  // namespace

std::string state_csv_header(Eigen::Index dim) {
    std::string h = "t";
    for (const char* stem : {"x", "xdot", "xd", "e1", "e2", "u", "eu"}) indexed(h, stem, dim);
    h += ",tau_i,tau_s";
    return h;
}

std::string monitor_csv_header(Eigen::Index dim) {
    std::string h = "t";
    for (const char* stem : {"e1", "e2", "r", "eu", "Nd"}) indexed(h, stem, dim);
    h += ",z_norm,z_tau_norm,y_norm,V,V_dot_fd,P,Q,R,S,decay_ok,inside_SD,Ntilde_norm,Ntilde_bound,"
         "open_loop_residual";
    return h;
}

std::string sweep_csv_header() {
    return "value,verdict,steady_y,max_e1,max_e1_final_half,diverged,conditions_ok,error";
}

void write_state_csv(std::ostream& os, const std::vector<StateRow>& rows, Eigen::Index dim) {
    os << state_csv_header(dim) << '\n';
    for (const auto& r : rows) {
        os << format_double(r.t);
        put(os, r.x);
        put(os, r.xdot);
        put(os, r.xd);
        put(os, r.e1);
        put(os, r.e2);
        put(os, r.u);
        put(os, r.e_u);
        put(os, r.tau_i);
        put(os, r.tau_s);
        os << '\n';
    }
}

void write_monitor_csv(std::ostream& os, const std::vector<MonitorRecord>& records, Eigen::Index dim) {
    os << monitor_csv_header(dim) << '\n';
    for (const auto& m : records) {
        os << format_double(m.t);
        put(os, m.e1);
        put(os, m.e2);
        put(os, m.r);
        put(os, m.e_u);
        put(os, m.N_d);
        put(os, m.z_norm);
        put(os, m.z_tau_norm);
        put(os, m.y_norm);
        put(os, m.V);
        put(os, m.has_fd ? m.V_dot_fd : std::nan(""));
        put(os, m.lk.P);
        put(os, m.lk.Q);
        put(os, m.lk.R);
        put(os, m.lk.S);
        os << ',' << (m.decay_ok ? 1 : 0) << ',' << (m.inside_SD ? 1 : 0);
        put(os, m.Ntilde_norm);
        put(os, m.Ntilde_bound);
        put(os, m.open_loop_residual);
        os << '\n';
    }
}

void write_sweep_csv(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << sweep_csv_header() << '\n';
    for (const auto& r : rows) {
        std::string err = r.error;
        for (char& c : err) {
            if (c == ',' || c == '\n' || c == '"') c = ' ';
        }
        os << format_double(r.value) << ',' << r.verdict;
        put(os, r.steady_y);
        put(os, r.max_e1);
        put(os, r.max_e1_final_half);
        os << ',' << (r.diverged ? 1 : 0) << ',' << (r.conditions_ok ? 1 : 0) << ',' << err << '\n';
    }
}

KeyValues report_pairs(const SimResult& r, const SimConfig& cfg) {
    KeyValues kv;
    auto add = [&kv](std::string k, std::string v) { kv.emplace_back(std::move(k), std::move(v)); };
    auto addd = [&add](std::string k, double v) { add(std::move(k), format_double(v)); };

    add("verdict", r.verdict());
    add("conditions", r.conditions_ok ? "satisfied" : "not satisfied");
    add("regime", r.theorem.global() ? "global (Remark 2)" : "semi-global");
    add("accuracy", r.reduced_order ? "reduced-order accuracy" : "full-order");
    addd("t0", cfg.t0);
    addd("t_end", cfg.t_end);
    addd("h", cfg.h);
    add("steps", std::to_string(r.rows.empty() ? 0 : r.rows.size() - 1));
    addd("sigma", r.theorem.sigma);
    addd("delta", r.theorem.delta);
    addd("zeta_nd1", r.zeta_used);
    add("zeta_source", r.zeta_estimated ? "estimated" : "declared");
    addd("ultimate_bound", r.theorem.ultimate_bound);
    addd("decay_radius", r.theorem.decay_radius);
    addd("r_D", r.theorem.radii.r_D);
    addd("r_SD", r.theorem.radii.r_SD);
    add("input_delay_valid", yes_no(r.input_validation.passed()));
    add("state_delay_valid", yes_no(r.state_validation.passed()));
    addd("input_delay_scale", cfg.input_delay_scale);
    add("lookups", std::to_string(r.lookups.lookups));
    add("clamped_lookups", std::to_string(r.lookups.clamped));
    addd("max_e1", r.max_e1);
    addd("max_e1_final_half", r.max_e1_final_half);
    add("diverged", yes_no(r.diverged));
    if (r.diverged) add("divergence", r.divergence_message);

    if (r.report) {
        const auto& c = *r.report;
        add("samples", std::to_string(c.samples));
        add("excluded_samples", std::to_string(c.excluded_samples));
        add("decay_checked", std::to_string(c.decay_checked));
        add("decay_violations", std::to_string(c.decay_violations));
        addd("decay_violation_fraction", c.decay_violation_fraction);
        addd("first_entry_time", c.first_entry_time);
        add("remains_after_entry", yes_no(c.remains_after_entry));
        addd("final_half_max_y", c.final_half_max_y);
        add("final_half_within", yes_no(c.final_half_within));
        add("initial_in_SD", yes_no(c.initial_in_SD));
        add("never_left_D", yes_no(c.never_left_D));
        add("sandwich_violations", std::to_string(c.sandwich_violations));
        add("embedding_violations", std::to_string(c.embedding_violations));
        add("eu_violations", std::to_string(c.eu_violations));
        addd("max_eu_ratio", c.max_eu_ratio);
        add("zeta_violations", std::to_string(c.zeta_violations));
        addd("max_nd_norm", c.max_nd_norm);
        add("ntilde_checked", yes_no(c.ntilde_checked));
        add("ntilde_violations", std::to_string(c.ntilde_violations));
        addd("max_ntilde_ratio", c.max_ntilde_ratio);
        add("derivative_checked", yes_no(c.derivative_checked));
        addd("max_derivative_rel_error", c.max_derivative_rel_error);
        addd("max_open_loop_residual", c.max_open_loop_residual);
        for (std::size_t i = 0; i < c.diagnostics.size(); ++i) {
            add("diagnostic_" + std::to_string(i + 1), c.diagnostics[i]);
        }
    }
    return kv;
}

void write_report_kv(std::ostream& os, const KeyValues& kv) {
    for (const auto& [k, v] : kv) os << k << '=' << v << '\n';
}

void write_condition_table(std::ostream& os, const TheoremCheck& th) {
    auto line = [&os](const Condition& c) {
        os << "  " << (c.passed ? "pass" : "FAIL") << "  " << c.name << "  (" << format_double(c.lhs) << " < "
           << format_double(c.rhs) << ", margin " << format_double(c.margin) << ")\n";
    };
    for (const auto& c : th.gain_conditions) line(c);
    line(th.delay_cond1);
    line(th.delay_cond2.condition);
    if (th.remark2.applicable) line(th.remark2.condition);
}

void write_report_txt(std::ostream& os, const SimResult& r, const KeyValues& kv) {
    os << "verdict: " << r.verdict() << '\n';
    for (const auto& l : r.labels()) os << "label: " << l << '\n';
    os << "\nconditions:\n";
    write_condition_table(os, r.theorem);
    os << "\nsummary:\n";
    for (const auto& [k, v] : kv) os << "  " << k << " = " << v << '\n';
}

}  // namespace delaycomp
