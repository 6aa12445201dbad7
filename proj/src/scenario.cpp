#include "delaycomp/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace delaycomp {

namespace {

enum class Kind { Number, Bool, String, Array };

struct KeySpec {
    const char* key;
    Kind kind;
};

// Every accepted key. Scalars of Kind::Number are sweepable.
constexpr KeySpec kSchema[] = {
    {"sim.t0", Kind::Number},
    {"sim.t_end", Kind::Number},
    {"sim.h", Kind::Number},
    {"sim.initial_x", Kind::Array},
    {"sim.initial_xdot", Kind::Array},
    {"sim.monitor", Kind::Bool},
    {"sim.seed", Kind::Number},
    {"sim.init_jitter", Kind::Number},
    {"plant.name", Kind::String},
    {"plant.coeffs", Kind::Array},
    {"trajectory.offset", Kind::Array},
    {"trajectory.amplitude", Kind::Array},
    {"trajectory.frequency", Kind::Array},
    {"trajectory.phase", Kind::Array},
    {"disturbance.amplitude", Kind::Array},
    {"disturbance.frequency", Kind::Number},
    {"disturbance.phase", Kind::Array},
    {"delays.input.kind", Kind::String},
    {"delays.input.params", Kind::Array},
    {"delays.input.phi1", Kind::Number},
    {"delays.input.phi2", Kind::Number},
    {"delays.input.times", Kind::Array},
    {"delays.input.values", Kind::Array},
    {"delays.state.kind", Kind::String},
    {"delays.state.params", Kind::Array},
    {"delays.state.phi1", Kind::Number},
    {"delays.state.phi2", Kind::Number},
    {"delays.state.times", Kind::Array},
    {"delays.state.values", Kind::Array},
    {"gains.alpha1", Kind::Number},
    {"gains.alpha2", Kind::Number},
    {"gains.ks", Kind::Number},
    {"gains.gamma1", Kind::Number},
    {"gains.gamma2", Kind::Number},
    {"gains.omega", Kind::Number},
    {"controller.input_delay_scale", Kind::Number},
    {"bounding.rho1", Kind::Array},
    {"bounding.rho2", Kind::Array},
    {"bounding.rho_bar", Kind::Number},
    {"bounding.zeta_nd1", Kind::Number},
    {"bounding.zeta_mode", Kind::String},
    {"output.dir", Kind::String},
    {"output.monitor_csv", Kind::Bool},
    {"output.report_kv", Kind::Bool},
};

const KeySpec* find_spec(const std::string& key) {
    for (const auto& s : kSchema) {
        if (key == s.key) return &s;
    }
    return nullptr;
}

const char* kind_name(Kind k) {
    switch (k) {
        case Kind::Number: return "a number";
        case Kind::Bool: return "a boolean";
        case Kind::String: return "a string";
        case Kind::Array: return "a numeric array";
    }
    return "?";
}

Kind kind_of(const ConfigValue& v) {
    return static_cast<Kind>(v.value.index());
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

// Strips a trailing comment, ignoring '#' inside a string.
std::string strip_comment(const std::string& s) {
    bool in_str = false;
    for (std::size_t i = 0; i < s.size(); ++i) {
        if (s[i] == '"') in_str = !in_str;
        if (s[i] == '#' && !in_str) return s.substr(0, i);
    }
    return s;
}

bool parse_number(const std::string& text, double& out) {
    const std::string t = trim(text);
    if (t.empty()) return false;
    const char* begin = t.c_str();
    char* end = nullptr;
    errno = 0;
    out = std::strtod(begin, &end);
    if (end != begin + t.size() || errno == ERANGE) return false;
    return std::isfinite(out);
}

bool valid_name(const std::string& s) {
    if (s.empty()) return false;
    return std::all_of(s.begin(), s.end(), [](unsigned char c) {
        return std::isalnum(c) || c == '_' || c == '.';
    });
}

ConfigValue parse_value(const std::string& raw, int line) {
    const std::string v = trim(raw);
    if (v.empty()) throw ConfigError("missing value", line);
    if (v == "true" || v == "false") return {v == "true", line};
    if (v.front() == '"') {
        if (v.size() < 2 || v.back() != '"') throw ConfigError("unterminated string", line);
        const std::string inner = v.substr(1, v.size() - 2);
        if (inner.find('"') != std::string::npos) throw ConfigError("stray quote in string", line);
        return {inner, line};
    }
    if (v.front() == '[') {
        if (v.back() != ']') throw ConfigError("unterminated array", line);
        std::vector<double> items;
        const std::string inner = trim(v.substr(1, v.size() - 2));
        if (!inner.empty()) {
            std::stringstream ss(inner);
            std::string item;
            while (std::getline(ss, item, ',')) {
                double d = 0.0;
                if (!parse_number(item, d)) {
                    throw ConfigError("array element '" + trim(item) + "' is not a finite number", line);
                }
                items.push_back(d);
            }
            if (inner.back() == ',') throw ConfigError("trailing comma in array", line);
        }
        return {items, line};
    }
    double d = 0.0;
    if (!parse_number(v, d)) throw ConfigError("cannot parse value '" + v + "'", line);
    return {d, line};
}

// Typed accessors over the table.
class Reader {
public:
    explicit Reader(const ConfigTable& t) : t_(t) {}

    const ConfigValue* find(const std::string& key) const {
        auto it = t_.find(key);
        return it == t_.end() ? nullptr : &it->second;
    }
    bool has(const std::string& key) const { return find(key) != nullptr; }
    bool has_section(const std::string& prefix) const {
        const std::string p = prefix + ".";
        return std::any_of(t_.begin(), t_.end(),
                           [&](const auto& kv) { return kv.first.rfind(p, 0) == 0; });
    }
    int line(const std::string& key) const {
        const auto* v = find(key);
        return v ? v->line : 0;
    }

    double number(const std::string& key) const {
        return std::get<double>(require(key).value);
    }
    double number(const std::string& key, double fallback) const {
        const auto* v = find(key);
        return v ? std::get<double>(v->value) : fallback;
    }
    bool boolean(const std::string& key, bool fallback) const {
        const auto* v = find(key);
        return v ? std::get<bool>(v->value) : fallback;
    }
    std::string string(const std::string& key) const {
        return std::get<std::string>(require(key).value);
    }
    std::string string(const std::string& key, const std::string& fallback) const {
        const auto* v = find(key);
        return v ? std::get<std::string>(v->value) : fallback;
    }
    std::vector<double> array(const std::string& key) const {
        return std::get<std::vector<double>>(require(key).value);
    }
    std::vector<double> array(const std::string& key, std::vector<double> fallback) const {
        const auto* v = find(key);
        return v ? std::get<std::vector<double>>(v->value) : fallback;
    }
    Vector vector(const std::string& key, Eigen::Index n) const {
        return to_vector(key, array(key), n);
    }
    Vector vector(const std::string& key, Eigen::Index n, double fill) const {
        if (!has(key)) return Vector::Constant(n, fill);
        return vector(key, n);
    }

    const ConfigValue& require(const std::string& key) const {
        const auto* v = find(key);
        if (!v) throw ConfigError("missing required key '" + key + "'");
        return *v;
    }

private:
    Vector to_vector(const std::string& key, const std::vector<double>& a, Eigen::Index n) const {
        if (static_cast<Eigen::Index>(a.size()) != n) {
            throw ConfigError("'" + key + "' needs " + std::to_string(n) + " entries, got " +
                                  std::to_string(a.size()),
                              line(key));
        }
        return Eigen::Map<const Vector>(a.data(), n);
    }

    const ConfigTable& t_;
};

DelayProfile build_delay(const Reader& r, const std::string& sec) {
    if (!r.has_section(sec)) return DelayProfile::constant(0.0);
    const std::string kind_key = sec + ".kind";
    const int line = r.line(kind_key);
    DelayKind kind;
    try {
        kind = delay_kind_from_string(r.string(kind_key));
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what(), line);
    }
    const bool has_phi = r.has(sec + ".phi1") || r.has(sec + ".phi2");
    if (has_phi && !(r.has(sec + ".phi1") && r.has(sec + ".phi2"))) {
        throw ConfigError(sec + ": give both phi1 and phi2 or neither", line);
    }
    try {
        switch (kind) {
            case DelayKind::Constant: {
                const auto p = r.array(sec + ".params");
                if (p.size() != 1) throw ConfigError(sec + ".params: constant delay takes [value]", r.line(sec + ".params"));
                return has_phi ? DelayProfile::constant(p[0], r.number(sec + ".phi1"), r.number(sec + ".phi2"))
                               : DelayProfile::constant(p[0]);
            }
            case DelayKind::Sinusoidal: {
                const auto p = r.array(sec + ".params");
                if (p.size() != 3) throw ConfigError(sec + ".params: sinusoidal delay takes [a, b, c]", r.line(sec + ".params"));
                return has_phi ? DelayProfile::sinusoidal(p[0], p[1], p[2], r.number(sec + ".phi1"),
                                                          r.number(sec + ".phi2"))
                               : DelayProfile::sinusoidal(p[0], p[1], p[2]);
            }
            case DelayKind::Table:
                if (!has_phi) throw ConfigError(sec + ": table delay needs phi1 and phi2", line);
                return DelayProfile::table(r.array(sec + ".times"), r.array(sec + ".values"),
                                           r.number(sec + ".phi1"), r.number(sec + ".phi2"));
        }
    } catch (const PreconditionError& e) {
        throw ConfigError(sec + ": " + e.what(), line);
    }
    throw ConfigError(sec + ": unsupported delay kind", line);
}

}  // namespace

ConfigTable parse_config(const std::string& text) {
    ConfigTable table;
    std::set<std::string> sections;
    std::string section;
    std::istringstream in(text);
    std::string raw;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError("malformed section header", line);
            section = trim(s.substr(1, s.size() - 2));
            if (!valid_name(section)) throw ConfigError("malformed section name '" + section + "'", line);
            const std::string prefix = section + ".";
            const bool known = std::any_of(std::begin(kSchema), std::end(kSchema), [&](const KeySpec& k) {
                return std::string(k.key).rfind(prefix, 0) == 0;
            });
            if (!known) throw ConfigError("unknown section [" + section + "]", line);
            if (!sections.insert(section).second) throw ConfigError("duplicate section [" + section + "]", line);
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line);
        const std::string key = trim(s.substr(0, eq));
        if (!valid_name(key) || key.find('.') != std::string::npos) {
            throw ConfigError("malformed key '" + key + "'", line);
        }
        if (section.empty()) throw ConfigError("key '" + key + "' outside any section", line);
        const std::string full = section + "." + key;
        const KeySpec* spec = find_spec(full);
        if (!spec) throw ConfigError("unknown key '" + key + "' in [" + section + "]", line);
        ConfigValue v = parse_value(s.substr(eq + 1), line);
        if (kind_of(v) != spec->kind) {
            throw ConfigError("'" + full + "' must be " + kind_name(spec->kind), line);
        }
        if (!table.emplace(full, std::move(v)).second) throw ConfigError("duplicate key '" + full + "'", line);
    }
    return table;
}

Scenario build_scenario(const ConfigTable& table, std::string source) {
    const Reader r(table);
    Scenario sc;
    sc.source = std::move(source);
    sc.table = table;
    SimConfig& c = sc.sim;

    c.t0 = r.number("sim.t0", 0.0);
    c.t_end = r.number("sim.t_end");
    c.h = r.number("sim.h");
    if (!(c.h > 0.0)) throw ConfigError("sim.h must be positive", r.line("sim.h"));
    if (!(c.t_end > c.t0)) throw ConfigError("sim.t_end must exceed sim.t0", r.line("sim.t_end"));
    c.monitor_enabled = r.boolean("sim.monitor", true);
    const double seed = r.number("sim.seed", 1.0);
    if (seed < 0.0 || seed != std::floor(seed) || seed > 9.007199254740992e15) {
        throw ConfigError("sim.seed must be a nonnegative integer", r.line("sim.seed"));
    }
    c.seed = static_cast<std::uint64_t>(seed);
    c.init_jitter = r.number("sim.init_jitter", 0.0);
    if (!(c.init_jitter >= 0.0)) throw ConfigError("sim.init_jitter must be >= 0", r.line("sim.init_jitter"));

    const auto x0 = r.array("sim.initial_x");
    const auto n = static_cast<Eigen::Index>(x0.size());
    if (n == 0) throw ConfigError("sim.initial_x must not be empty", r.line("sim.initial_x"));
    c.initial_x = r.vector("sim.initial_x", n);
    c.initial_xdot = r.vector("sim.initial_xdot", n, 0.0);

    try {
        c.plant = make_plant(r.string("plant.name"), r.array("plant.coeffs", {}), n);
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what(), r.line("plant.name"));
    }

    if (r.has_section("trajectory")) {
        c.trajectory = DesiredTrajectory(r.vector("trajectory.offset", n, 0.0),
                                         r.vector("trajectory.amplitude", n, 0.0),
                                         r.vector("trajectory.frequency", n, 0.0),
                                         r.vector("trajectory.phase", n, 0.0));
    } else {
        c.trajectory = DesiredTrajectory::hold(Vector::Zero(n));
    }
    if (r.has_section("disturbance")) {
        c.disturbance = Disturbance(r.vector("disturbance.amplitude", n, 0.0),
                                    r.number("disturbance.frequency", 0.0),
                                    r.vector("disturbance.phase", n, 0.0));
    } else {
        c.disturbance = Disturbance::none(n);
    }

    c.input_delay = build_delay(r, "delays.input");
    c.state_delay = build_delay(r, "delays.state");
    c.input_delay_scale = r.number("controller.input_delay_scale", 1.0);
    if (!(c.input_delay_scale >= 0.0)) {
        throw ConfigError("controller.input_delay_scale must be >= 0", r.line("controller.input_delay_scale"));
    }

    auto& g = c.gains;
    g.alpha1 = r.number("gains.alpha1");
    g.alpha2 = r.number("gains.alpha2");
    g.ks = r.number("gains.ks");
    g.gamma1 = r.number("gains.gamma1");
    g.gamma2 = r.number("gains.gamma2");
    g.omega = r.number("gains.omega");
    for (const char* k : {"gains.alpha1", "gains.alpha2", "gains.ks", "gains.gamma1", "gains.gamma2", "gains.omega"}) {
        if (!(r.number(k) > 0.0)) throw ConfigError(std::string(k) + " must be positive", r.line(k));
    }

    const auto rho1 = r.array("bounding.rho1");
    const auto rho2 = r.array("bounding.rho2");
    if (rho1.size() != 2) throw ConfigError("bounding.rho1 takes [intercept, slope]", r.line("bounding.rho1"));
    if (rho2.size() != 2) throw ConfigError("bounding.rho2 takes [intercept, slope]", r.line("bounding.rho2"));
    for (const auto* p : {&rho1, &rho2}) {
        if ((*p)[0] < 0.0 || (*p)[1] < 0.0) {
            throw ConfigError("bounding functions need nonnegative coefficients",
                              r.line(p == &rho1 ? "bounding.rho1" : "bounding.rho2"));
        }
    }

    const std::string mode = r.string("bounding.zeta_mode", "declared");
    double zeta = 0.0;
    bool estimated = false;
    if (mode == "estimate") {
        if (r.has("bounding.zeta_nd1")) {
            throw ConfigError("zeta_nd1 given together with zeta_mode = \"estimate\"", r.line("bounding.zeta_nd1"));
        }
        estimated = true;
    } else if (mode == "declared") {
        zeta = r.number("bounding.zeta_nd1");
        if (!(zeta >= 0.0)) throw ConfigError("bounding.zeta_nd1 must be >= 0", r.line("bounding.zeta_nd1"));
    } else {
        throw ConfigError("bounding.zeta_mode must be \"declared\" or \"estimate\"", r.line("bounding.zeta_mode"));
    }
    c.bounding = BoundingData::affine(rho1[0], rho1[1], rho2[0], rho2[1], zeta);
    c.bounding.zeta_estimated = estimated;
    if (r.has("bounding.rho_bar")) {
        const double rb = r.number("bounding.rho_bar");
        if (!(rb >= 0.0)) throw ConfigError("bounding.rho_bar must be >= 0", r.line("bounding.rho_bar"));
        c.bounding.rho_bar = rb;
    } else if (rho1[1] == 0.0 && rho2[1] == 0.0) {
        const DelayBounds d = delay_bounds(c);
        c.bounding.rho_bar = rho(0.0, g, c.bounding, d);
    }

    sc.output_dir = r.string("output.dir", "out");
    sc.write_monitor_csv = r.boolean("output.monitor_csv", true);
    sc.write_report_kv = r.boolean("output.report_kv", true);

    try {
        c.validate();
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    return sc;
}

Scenario parse_scenario(const std::string& text, std::string source) {
    return build_scenario(parse_config(text), std::move(source));
}

Scenario load_scenario(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    try {
        return parse_scenario(ss.str(), path);
    } catch (const ConfigError& e) {
        throw ConfigError(path + ": " + e.what());
    }
}

std::vector<std::string> sweepable_keys() {
    std::vector<std::string> out;
    for (const auto& s : kSchema) {
        if (s.kind == Kind::Number) out.emplace_back(s.key);
    }
    return out;
}

bool is_sweepable(const std::string& key) {
    const KeySpec* s = find_spec(key);
    return s && s->kind == Kind::Number;
}

Scenario with_override(const Scenario& base, const std::string& key, double value) {
    if (!is_sweepable(key)) throw ConfigError("'" + key + "' is not a sweepable numeric key");
    ConfigTable t = base.table;
    t[key] = ConfigValue{value, 0};
    return build_scenario(t, base.source);
}

}  // namespace delaycomp
