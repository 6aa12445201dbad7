#include "delaycomp/gain_synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <initializer_list>

namespace delaycomp {

void GainSet::validate() const {
    const std::pair<const char*, double> entries[] = {{"alpha1", alpha1}, {"alpha2", alpha2},
                                                      {"ks", ks},         {"gamma1", gamma1},
                                                      {"gamma2", gamma2}, {"omega", omega}};
    for (const auto& [name, value] : entries) {
        if (!(value > 0.0)) throw PreconditionError(std::string("gain ") + name + " must be positive");
    }
}

void DelayBounds::validate() const {
    if (!(phi_i1 >= 0.0 && phi_i2 >= 0.0 && phi_s1 >= 0.0 && phi_s2 >= 0.0)) {
        throw PreconditionError("delay bounds must be nonnegative");
    }
    if (!(phi_i2 < 1.0)) throw PreconditionError("input delay rate bound phi_i2 must be < 1");
    if (!(phi_s2 < 1.0)) throw PreconditionError("state delay rate bound phi_s2 must be < 1");
    if (!(phi_i1 + phi_i2 < 1.0)) throw PreconditionError("input delay bounds need phi_i1 + phi_i2 < 1");
}

BoundingData BoundingData::affine(double r1_0, double r1_1, double r2_0, double r2_1, double zeta) {
    BoundingData b;
    b.rho1 = [r1_0, r1_1](double s) { return r1_0 + r1_1 * s; };
    b.rho2 = [r2_0, r2_1](double s) { return r2_0 + r2_1 * s; };
    b.zeta_nd1 = zeta;
    return b;
}

void BoundingData::validate(double s_max, int samples) const {
    if (!rho1 || !rho2) throw PreconditionError("bounding functions rho1 and rho2 are required");
    if (!(zeta_nd1 >= 0.0)) throw PreconditionError("zeta_nd1 must be nonnegative");
    const double ds = s_max / (samples - 1);
    double prev1 = rho1(0.0);
    double prev2 = rho2(0.0);
    if (prev1 < 0.0 || prev2 < 0.0) throw PreconditionError("bounding functions must be nonnegative");
    for (int k = 1; k < samples; ++k) {
        const double s = k * ds;
        const double v1 = rho1(s);
        const double v2 = rho2(s);
        if (v1 < prev1) throw PreconditionError("rho1 is not nondecreasing near s=" + std::to_string(s));
        if (v2 < prev2) throw PreconditionError("rho2 is not nondecreasing near s=" + std::to_string(s));
        prev1 = v1;
        prev2 = v2;
    }
}

double rho(double z_norm, const GainSet& g, const BoundingData& b, const DelayBounds& d) {
    const double r1 = b.rho1(z_norm);
    const double r2 = b.rho2(z_norm);
    return std::sqrt((g.gamma1 + 2.0 * g.gamma2 * d.phi_s1) * r2 * r2 + 3.0 * r1 * r1);
}

namespace {

// ratio num/den with a zero denominator read as +inf
double ratio_or_inf(double num, double den) { return den > 0.0 ? num / den : kInfinity; }

}  // namespace

double sigma(const GainSet& g, const DelayBounds& d) {
    return 0.5 * std::min({g.alpha1 / 2.0, g.alpha2 / 2.0, 1.0,
                           ratio_or_inf(g.omega * (1.0 - d.phi_i2), 6.0 * d.phi_i1)});
}

double delta(const GainSet& g, const DelayBounds& d, double sigma_val) {
    return 0.5 * std::min({sigma_val, ratio_or_inf(g.omega * (1.0 - d.phi_i2), 3.0 * d.phi_i1),
                           ratio_or_inf(1.0 - d.phi_i2, 3.0 * d.phi_i1),
                           g.gamma2 * (1.0 - d.phi_s2) / g.gamma1,
                           ratio_or_inf(1.0 - d.phi_s2, 2.0 * d.phi_s1)});
}

Condition strict_less(std::string name, double lhs, double rhs) {
    Condition c;
    c.name = std::move(name);
    c.lhs = lhs;
    c.rhs = rhs;
    c.passed = lhs < rhs;
    c.margin = rhs - lhs;
    return c;
}

std::vector<Condition> check_gain_conditions(const GainSet& g, const DelayBounds& d) {
    return {
        strict_less("alpha1 > 1", 1.0, g.alpha1),
        strict_less("alpha2 > 2", 2.0, g.alpha2),
        strict_less("gamma1 > 1/(1 - phi_s2)", 1.0 / (1.0 - d.phi_s2), g.gamma1),
        strict_less("omega > 3 phi_i1/(1 - phi_i2)", 3.0 * d.phi_i1 / (1.0 - d.phi_i2), g.omega),
    };
}

Condition check_delay_cond1(const GainSet& g, const DelayBounds& d) {
    const double kp1 = g.ks + 1.0;
    const double rhs = g.ks / (6.0 * (g.omega + 1.0) * kp1 * kp1);
    return strict_less("phi_i1 < ks/(6(omega+1)(ks+1)^2)", d.phi_i1, rhs);
}

double first_crossing_radius(const BoundFn& rho_fn, double threshold) {
    if (rho_fn(0.0) >= threshold) return 0.0;
    double hi = 1.0;
    while (rho_fn(hi) < threshold) {
        hi *= 2.0;
        if (hi > 1e12) return kInfinity;
    }
    double lo = 0.0;
    // Invariant: rho(lo) < threshold <= rho(hi).
    while (hi - lo > 1e-10 * hi) {
        const double mid = 0.5 * (lo + hi);
        (rho_fn(mid) >= threshold ? hi : lo) = mid;
    }
    return hi;
}

Cond2Result check_delay_cond2(const GainSet& g, const DelayBounds& d, const BoundingData& b,
                              double sigma_val, double delta_val) {
    b.validate();
    Cond2Result out;
    out.threshold = std::sqrt(2.0 * g.ks * sigma_val);
    out.radius = first_crossing_radius([&](double s) { return rho(s, g, b, d); }, out.threshold);
    const double lhs = 3.0 * b.zeta_nd1 * b.zeta_nd1 / (g.ks * delta_val);
    const double rhs = out.radius * out.radius;
    out.condition = strict_less("3 zeta^2/(ks delta) < R*^2", lhs, rhs);
    return out;
}

Remark2Result check_remark2(const GainSet& g, const BoundingData& b, double sigma_val) {
    Remark2Result out;
    if (!b.rho_bar) {
        out.condition.name = "ks > rho_bar/(2 sigma)";
        return out;
    }
    out.applicable = true;
    out.threshold = *b.rho_bar / (2.0 * sigma_val);
    out.condition = strict_less("ks > rho_bar/(2 sigma)", out.threshold, g.ks);
    out.passed = out.condition.passed;
    out.global = out.passed;
    return out;
}

double ultimate_bound(const GainSet& g, const BoundingData& b, double delta_val) {
    return std::sqrt(3.0 * b.zeta_nd1 * b.zeta_nd1 / (g.ks * delta_val));
}

double decay_radius(const GainSet& g, const BoundingData& b, double delta_val) {
    return std::sqrt(3.0 * b.zeta_nd1 * b.zeta_nd1 / (2.0 * g.ks * delta_val));
}

RegionRadii region_radii(const GainSet& g, const BoundingData& b, const DelayBounds& d,
                         double sigma_val) {
    if (check_remark2(g, b, sigma_val).global) return {};
    b.validate();
    const double threshold = std::sqrt(2.0 * g.ks * sigma_val);
    const double r = first_crossing_radius([&](double s) { return rho(s, g, b, d); }, threshold);
    return {r, std::sqrt(0.5) * r};
}

namespace {

bool ks_feasible(double ks, const DelayBounds& d, const BoundingData& b, GainSet g, double sig,
                 double del) {
    g.ks = ks;
    if (!check_delay_cond1(g, d).passed) return false;
    if (b.rho_bar) return check_remark2(g, b, sig).passed;
    return check_delay_cond2(g, d, b, sig, del).condition.passed;
}

// Bisects between a feasible and an infeasible ks; returns the boundary.
template <typename Pred>
double refine_edge(double feasible, double infeasible, Pred&& ok) {
    for (int it = 0; it < 200; ++it) {
        const double mid = std::sqrt(feasible * infeasible);
        if (mid == feasible || mid == infeasible) break;
        (ok(mid) ? feasible : infeasible) = mid;
    }
    return 0.5 * (feasible + infeasible);
}

}  // namespace

std::optional<KsInterval> search_feasible_ks(const DelayBounds& d, const BoundingData& b,
                                             const GainSet& partial) {
    for (const auto& c : check_gain_conditions(partial, d)) {
        if (!c.passed) {
            throw PreconditionError("search_feasible_ks: gain condition '" + c.name + "' fails");
        }
    }
    b.validate();
    const double sig = sigma(partial, d);
    const double del = delta(partial, d, sig);
    auto ok = [&](double ks) { return ks_feasible(ks, d, b, partial, sig, del); };

    // 2001 log-spaced points over [1e-4, 1e6]; index 800 is exactly ks = 1.
    constexpr int kPoints = 2001;
    std::vector<double> grid(kPoints);
    for (int i = 0; i < kPoints; ++i) grid[i] = std::pow(10.0, -4.0 + 10.0 * i / (kPoints - 1));
    grid[800] = 1.0;

    std::vector<char> feasible(kPoints);
    for (int i = 0; i < kPoints; ++i) feasible[i] = ok(grid[i]) ? 1 : 0;

    // Longest contiguous feasible run.
    int best_begin = -1, best_len = 0;
    for (int i = 0; i < kPoints;) {
        if (!feasible[i]) {
            ++i;
            continue;
        }
        int j = i;
        while (j < kPoints && feasible[j]) ++j;
        if (j - i > best_len) best_begin = i, best_len = j - i;
        i = j;
    }
    if (best_len == 0) return std::nullopt;

    const int first = best_begin;
    const int last = best_begin + best_len - 1;
    KsInterval out;
    out.lo = first == 0 ? 0.0 : refine_edge(grid[first], grid[first - 1], ok);
    out.hi = last == kPoints - 1 ? kInfinity : refine_edge(grid[last], grid[last + 1], ok);
    return out;
}

bool TheoremCheck::all_passed() const {
    const auto conds = gating_conditions();
    return std::all_of(conds.begin(), conds.end(), [](const Condition& c) { return c.passed; });
}

std::vector<Condition> TheoremCheck::gating_conditions() const {
    std::vector<Condition> out = gain_conditions;
    out.push_back(delay_cond1);
    out.push_back(remark2.applicable ? remark2.condition : delay_cond2.condition);
    return out;
}

TheoremCheck evaluate_conditions(const GainSet& g, const DelayBounds& d, const BoundingData& b) {
    g.validate();
    TheoremCheck out;
    out.sigma = sigma(g, d);
    out.delta = delta(g, d, out.sigma);
    out.gain_conditions = check_gain_conditions(g, d);
    out.delay_cond1 = check_delay_cond1(g, d);
    out.delay_cond2 = check_delay_cond2(g, d, b, out.sigma, out.delta);
    out.remark2 = check_remark2(g, b, out.sigma);
    out.radii = region_radii(g, b, d, out.sigma);
    out.ultimate_bound = ultimate_bound(g, b, out.delta);
    out.decay_radius = decay_radius(g, b, out.delta);
    return out;
}

}  // namespace delaycomp
