#include "delaycomp/delay_profile.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

namespace delaycomp {

namespace {

// Absorbs round-off when a sampled sup meets a tight declared bound exactly.
constexpr double kBoundSlack = 1e-12;

bool within(double value, double bound) {
    return value <= bound + kBoundSlack * std::max(1.0, std::abs(bound));
}

void check_params(DelayKind kind, const std::vector<double>& params) {
    switch (kind) {
        case DelayKind::Constant:
            if (params.size() != 1) throw PreconditionError("constant delay takes 1 parameter");
            break;
        case DelayKind::Sinusoidal:
            if (params.size() != 3) throw PreconditionError("sinusoidal delay takes 3 parameters (a, b, c)");
            break;
        case DelayKind::Table:
            if (params.size() < 4 || params.size() % 2 != 0) {
                throw PreconditionError("table delay takes (t, value) pairs, at least two");
            }
            for (std::size_t i = 2; i < params.size(); i += 2) {
                if (!(params[i] > params[i - 2])) {
                    throw PreconditionError("table delay times must be strictly increasing");
                }
            }
            break;
    }
    for (double p : params) {
        if (!std::isfinite(p)) throw PreconditionError("delay parameters must be finite");
    }
}

}  // namespace

DelayProfile::DelayProfile(DelayKind kind, std::vector<double> params, double phi1, double phi2)
    : kind_(kind), params_(std::move(params)), phi1_(phi1), phi2_(phi2) {
    check_params(kind_, params_);
    if (!(phi1_ >= 0.0) || !(phi2_ >= 0.0)) {
        throw PreconditionError("delay bounds phi1, phi2 must be nonnegative");
    }
}

DelayProfile DelayProfile::constant(double value) { return constant(value, value, 0.0); }

DelayProfile DelayProfile::constant(double value, double phi1, double phi2) {
    return DelayProfile(DelayKind::Constant, {value}, phi1, phi2);
}

DelayProfile DelayProfile::sinusoidal(double a, double b, double c) {
    return sinusoidal(a, b, c, a + std::abs(b), std::abs(b * c));
}

DelayProfile DelayProfile::sinusoidal(double a, double b, double c, double phi1, double phi2) {
    return DelayProfile(DelayKind::Sinusoidal, {a, b, c}, phi1, phi2);
}

DelayProfile DelayProfile::table(std::vector<double> times, std::vector<double> values,
                                 double phi1, double phi2) {
    if (times.size() != values.size()) {
        throw PreconditionError("table delay: times and values differ in length");
    }
    std::vector<double> params;
    params.reserve(2 * times.size());
    for (std::size_t i = 0; i < times.size(); ++i) {
        params.push_back(times[i]);
        params.push_back(values[i]);
    }
    return DelayProfile(DelayKind::Table, std::move(params), phi1, phi2);
}

double DelayProfile::tau(double t) const {
    switch (kind_) {
        case DelayKind::Constant:
            return params_[0];
        case DelayKind::Sinusoidal:
            return params_[0] + params_[1] * std::sin(params_[2] * t);
        case DelayKind::Table: {
            const std::size_t n = params_.size() / 2;
            if (t <= params_[0]) return params_[1];
            if (t >= params_[2 * (n - 1)]) return params_[2 * n - 1];
            std::size_t k = 0;
            while (params_[2 * (k + 1)] <= t) ++k;
            const double t_lo = params_[2 * k], v_lo = params_[2 * k + 1];
            const double t_hi = params_[2 * k + 2], v_hi = params_[2 * k + 3];
            return v_lo + (v_hi - v_lo) * (t - t_lo) / (t_hi - t_lo);
        }
    }
    return 0.0;
}

double DelayProfile::tau_rate(double t) const {
    switch (kind_) {
        case DelayKind::Constant:
            return 0.0;
        case DelayKind::Sinusoidal:
            return params_[1] * params_[2] * std::cos(params_[2] * t);
        case DelayKind::Table: {
            const std::size_t n = params_.size() / 2;
            if (t < params_[0] || t >= params_[2 * (n - 1)]) return 0.0;
            std::size_t k = 0;
            while (params_[2 * (k + 1)] <= t) ++k;
            return (params_[2 * k + 3] - params_[2 * k + 1]) / (params_[2 * k + 2] - params_[2 * k]);
        }
    }
    return 0.0;
}

DelayProfile DelayProfile::scaled(double factor) const {
    if (!(factor >= 0.0)) throw PreconditionError("delay scale factor must be nonnegative");
    std::vector<double> p = params_;
    switch (kind_) {
        case DelayKind::Constant:
            p[0] *= factor;
            break;
        case DelayKind::Sinusoidal:
            p[0] *= factor;
            p[1] *= factor;
            break;
        case DelayKind::Table:
            for (std::size_t i = 1; i < p.size(); i += 2) p[i] *= factor;
            break;
    }
    return DelayProfile(kind_, std::move(p), phi1_ * factor, phi2_ * factor);
}

bool DelayProfile::identically_zero() const noexcept {
    switch (kind_) {
        case DelayKind::Constant:
            return params_[0] == 0.0;
        case DelayKind::Sinusoidal:
            return params_[0] == 0.0 && (params_[1] == 0.0 || params_[2] == 0.0);
        case DelayKind::Table:
            for (std::size_t i = 1; i < params_.size(); i += 2) {
                if (params_[i] != 0.0) return false;
            }
            return true;
    }
    return false;
}

double DelayProfile::period() const noexcept {
    if (kind_ == DelayKind::Sinusoidal && params_[2] != 0.0) {
        return 2.0 * std::numbers::pi / std::abs(params_[2]);
    }
    return 0.0;
}

bool DelayValidation::passed() const {
    return std::all_of(checks.begin(), checks.end(), [](const DelayCheck& c) { return c.passed; });
}

const DelayCheck* DelayValidation::first_failure() const {
    for (const auto& c : checks) {
        if (!c.passed) return &c;
    }
    return nullptr;
}

namespace {

SamplingGrid resolve_grid(const DelayProfile& p, SamplingGrid grid) {
    if (grid.samples < 2) grid.samples = 2;
    if (grid.t_end > grid.t_begin) return grid;
    if (p.period() > 0.0) {
        grid.t_end = grid.t_begin + p.period();
    } else if (p.kind() == DelayKind::Table) {
        const auto& q = p.params();
        grid.t_begin = std::min(grid.t_begin, q.front());
        grid.t_end = std::max(grid.t_begin, q[q.size() - 2]);
        if (grid.t_end <= grid.t_begin) grid.t_end = grid.t_begin + 1.0;
    } else {
        grid.t_end = grid.t_begin + 1.0;
    }
    return grid;
}

template <typename F>
void for_each_sample(const SamplingGrid& g, F&& f) {
    const double dt = (g.t_end - g.t_begin) / (g.samples - 1);
    for (int k = 0; k < g.samples; ++k) f(g.t_begin + k * dt);
}

DelayValidation validate_common(const DelayProfile& p, SamplingGrid grid) {
    grid = resolve_grid(p, grid);
    const double nan = std::numeric_limits<double>::quiet_NaN();

    DelayCheck nonneg{"tau >= 0", true, grid.t_begin, p.tau(grid.t_begin)};
    DelayCheck upper{"tau <= phi1", true, grid.t_begin, p.tau(grid.t_begin)};
    DelayCheck rate{"|tau_rate| <= phi2", true, grid.t_begin, std::abs(p.tau_rate(grid.t_begin))};

    auto visit = [&](double t) {
        const double tau = p.tau(t);
        const double r = std::abs(p.tau_rate(t));
        if (tau < nonneg.value) nonneg.value = tau, nonneg.witness_time = t;
        if (tau > upper.value) upper.value = tau, upper.witness_time = t;
        if (r > rate.value) rate.value = r, rate.witness_time = t;
    };
    for_each_sample(grid, visit);
    if (p.kind() == DelayKind::Table) {
        // Breakpoints carry the exact extremes of a piecewise-linear table.
        const auto& q = p.params();
        for (std::size_t i = 0; i < q.size(); i += 2) visit(q[i]);
    }

    nonneg.passed = nonneg.value >= 0.0;
    upper.passed = within(upper.value, p.phi1());
    rate.passed = within(rate.value, p.phi2());

    DelayValidation out;
    out.checks = {nonneg, upper, rate, DelayCheck{"phi2 < 1", p.phi2() < 1.0, nan, p.phi2()}};
    return out;
}

}  // namespace

DelayValidation validate_state_delay(const DelayProfile& p, SamplingGrid grid) {
    return validate_common(p, grid);
}

DelayValidation validate_input_delay(const DelayProfile& p, SamplingGrid grid) {
    DelayValidation out = validate_common(p, grid);
    const double sum = p.phi1() + p.phi2();
    out.checks.push_back(
        DelayCheck{"phi1 + phi2 < 1", sum < 1.0, std::numeric_limits<double>::quiet_NaN(), sum});
    return out;
}

double sampled_max_tau(const DelayProfile& p, SamplingGrid grid) {
    grid = resolve_grid(p, grid);
    double best = 0.0;
    for_each_sample(grid, [&](double t) { best = std::max(best, p.tau(t)); });
    if (p.kind() == DelayKind::Table) {
        const auto& q = p.params();
        for (std::size_t i = 1; i < q.size(); i += 2) best = std::max(best, q[i]);
    }
    return best;
}

double history_activation_time(const DelayProfile& p, double t0) {
    auto gap = [&](double t) { return t - p.tau(t) - t0; };
    if (gap(t0) >= 0.0) return t0;
    double lo = t0;
    double hi = t0 + std::max(p.phi1(), 1e-12);
    while (gap(hi) <= 0.0) {
        hi = t0 + 2.0 * (hi - t0);
        if (hi - t0 > 1e12) throw PreconditionError("delay never releases the initial history");
    }
    for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, std::abs(hi)); ++it) {
        const double mid = 0.5 * (lo + hi);
        (gap(mid) > 0.0 ? hi : lo) = mid;
    }
    return hi;
}

std::string to_string(DelayKind kind) {
    switch (kind) {
        case DelayKind::Constant: return "constant";
        case DelayKind::Sinusoidal: return "sinusoidal";
        case DelayKind::Table: return "table";
    }
    return "unknown";
}

DelayKind delay_kind_from_string(const std::string& name) {
    if (name == "constant") return DelayKind::Constant;
    if (name == "sinusoidal") return DelayKind::Sinusoidal;
    if (name == "table") return DelayKind::Table;
    throw PreconditionError("unknown delay kind '" + name + "'");
}

}  // namespace delaycomp
