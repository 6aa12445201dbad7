#pragma once

// Sufficient conditions for uniformly ultimately bounded tracking, the
// auxiliary constants sigma and delta, the region-of-attraction radii and the
// ultimate bound, plus a feasibility search over ks.
//
// All functions are pure. Strict inequalities are evaluated strictly; every
// condition reports a signed margin (positive means satisfied).

#include "delaycomp/types.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <string>
#include <vector>

namespace delaycomp {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

struct GainSet {
    double alpha1 = 2.0;
    double alpha2 = 3.0;
    double ks = 1.0;
    double gamma1 = 2.0;
    double gamma2 = 1.0;
    double omega = 1.0;

    /// Throws PreconditionError unless every gain is strictly positive.
    void validate() const;
};

struct DelayBounds {
    double phi_i1 = 0.0;
    double phi_i2 = 0.0;
    double phi_s1 = 0.0;
    double phi_s2 = 0.0;

    /// Throws PreconditionError for negative bounds, phi_i2 >= 1, phi_s2 >= 1
    /// or phi_i1 + phi_i2 >= 1.
    void validate() const;
};

using BoundFn = std::function<double(double)>;

struct BoundingData {
    BoundFn rho1;
    BoundFn rho2;
    std::optional<double> rho_bar;  ///< constant bound for the global regime
    double zeta_nd1 = 0.0;
    bool zeta_estimated = false;    ///< sampled estimate rather than a proven bound

    /// rho1(s) = r1_0 + r1_1 s, rho2(s) = r2_0 + r2_1 s.
    static BoundingData affine(double r1_0, double r1_1, double r2_0, double r2_1, double zeta);
    static BoundingData constant(double r1, double r2, double zeta) {
        return affine(r1, 0.0, r2, 0.0, zeta);
    }

    /// Throws PreconditionError if rho1 or rho2 decreases on a sampled grid
    /// over [0, s_max], or zeta_nd1 is negative.
    void validate(double s_max = 1e3, int samples = 2001) const;
};

/// sqrt((gamma1 + 2 gamma2 phi_s1) rho2(s)^2 + 3 rho1(s)^2)
[[nodiscard]] double rho(double z_norm, const GainSet& g, const BoundingData& b, const DelayBounds& d);

/// 1/2 min{alpha1/2, alpha2/2, 1, omega(1 - phi_i2)/(6 phi_i1)}. The last term
/// is treated as +inf when phi_i1 = 0.
[[nodiscard]] double sigma(const GainSet& g, const DelayBounds& d);

/// 1/2 min{sigma, omega(1 - phi_i2)/(3 phi_i1), (1 - phi_i2)/(3 phi_i1),
///         gamma2(1 - phi_s2)/gamma1, (1 - phi_s2)/(2 phi_s1)}
/// with terms divided by a zero delay bound treated as +inf.
[[nodiscard]] double delta(const GainSet& g, const DelayBounds& d, double sigma_val);

struct Condition {
    std::string name;
    bool passed = false;
    double lhs = 0.0;
    double rhs = 0.0;
    double margin = 0.0;  ///< rhs - lhs for "lhs < rhs"
};

/// Builds the record for `lhs < rhs`.
[[nodiscard]] Condition strict_less(std::string name, double lhs, double rhs);

/// alpha1 > 1, alpha2 > 2, gamma1 > 1/(1 - phi_s2), omega > 3 phi_i1/(1 - phi_i2).
[[nodiscard]] std::vector<Condition> check_gain_conditions(const GainSet& g, const DelayBounds& d);

/// phi_i1 < ks / (6 (omega + 1)(ks + 1)^2)
[[nodiscard]] Condition check_delay_cond1(const GainSet& g, const DelayBounds& d);

/// inf{a >= 0 : rho_fn(a) >= threshold} for nondecreasing rho_fn, by doubling
/// then bisection to 1e-10 relative. +inf when the level is never reached
/// before 1e12.
[[nodiscard]] double first_crossing_radius(const BoundFn& rho_fn, double threshold);

struct Cond2Result {
    Condition condition;
    double radius = 0.0;     ///< R* = inf rho^{-1}([sqrt(2 ks sigma), inf))
    double threshold = 0.0;  ///< sqrt(2 ks sigma)
};

/// 3 zeta^2 / (ks delta) < R*^2. Throws PreconditionError when rho1 or rho2
/// is not nondecreasing.
[[nodiscard]] Cond2Result check_delay_cond2(const GainSet& g, const DelayBounds& d,
                                            const BoundingData& b, double sigma_val, double delta_val);

struct Remark2Result {
    bool applicable = false;  ///< rho_bar present
    bool passed = false;
    bool global = false;
    double threshold = 0.0;   ///< rho_bar / (2 sigma)
    Condition condition;
};

/// ks > rho_bar / (2 sigma) when a constant bound rho_bar is available.
[[nodiscard]] Remark2Result check_remark2(const GainSet& g, const BoundingData& b, double sigma_val);

/// sqrt(3 zeta^2 / (ks delta))
[[nodiscard]] double ultimate_bound(const GainSet& g, const BoundingData& b, double delta_val);

/// sqrt(3 zeta^2 / (2 ks delta)): radius beyond which V decays at rate delta.
[[nodiscard]] double decay_radius(const GainSet& g, const BoundingData& b, double delta_val);

struct RegionRadii {
    double r_D = kInfinity;
    double r_SD = kInfinity;
};

/// r_D = R*, r_SD = R*/sqrt(2); both +inf when the constant-bound regime holds.
[[nodiscard]] RegionRadii region_radii(const GainSet& g, const BoundingData& b, const DelayBounds& d,
                                       double sigma_val);

struct KsInterval {
    double lo = 0.0;  ///< open lower end
    double hi = 0.0;  ///< open upper end (+inf allowed)
};

/// Range of ks on which the delay condition and the radius condition (the
/// constant-bound test when rho_bar is present) both hold. Log grid over
/// [1e-4, 1e6] containing ks = 1, refined by bisection at the edges.
/// Throws PreconditionError if the ks-independent gain conditions fail.
[[nodiscard]] std::optional<KsInterval> search_feasible_ks(const DelayBounds& d, const BoundingData& b,
                                                           const GainSet& partial);

/// Everything the theorem needs for one configuration.
struct TheoremCheck {
    double sigma = 0.0;
    double delta = 0.0;
    std::vector<Condition> gain_conditions;
    Condition delay_cond1;
    Cond2Result delay_cond2;
    Remark2Result remark2;
    RegionRadii radii;
    double ultimate_bound = 0.0;
    double decay_radius = 0.0;

    /// True when remark2 applies and passes.
    [[nodiscard]] bool global() const { return remark2.applicable && remark2.passed; }
    /// Gain conditions, delay condition and either the constant-bound test
    /// (when rho_bar is present) or the radius condition.
    [[nodiscard]] bool all_passed() const;
    /// Every condition that gates all_passed(), in report order.
    [[nodiscard]] std::vector<Condition> gating_conditions() const;
};

[[nodiscard]] TheoremCheck evaluate_conditions(const GainSet& g, const DelayBounds& d,
                                               const BoundingData& b);

}  // namespace delaycomp
