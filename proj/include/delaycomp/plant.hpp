#pragma once

// Second-order plants of the form
//
//   xddot = f(x, xdot, t) + g(x(t - tau_s), xdot(t - tau_s), t) + d(t) + u(t - tau_i)
//
// with benchmark instances, sinusoidal disturbances and sinusoidal desired
// trajectories.

#include "delaycomp/types.hpp"

#include <cmath>
#include <functional>
#include <string>
#include <vector>

namespace delaycomp {

using StateMap = std::function<Vector(const Vector& x, const Vector& xdot, double t)>;

struct PlantDynamics {
    Eigen::Index dim = 1;
    StateMap f;  ///< delay-free part
    StateMap g;  ///< part driven by the state-delayed arguments
    std::string name;
    bool time_invariant = true;
};

/// f(x, xdot, t) + g(x_del, xdot_del, t) + d_val + u_del. Throws
/// DivergenceError when the result is not finite.
[[nodiscard]] Vector accel(const PlantDynamics& p, const Vector& x, const Vector& xdot,
                           const Vector& x_del, const Vector& xdot_del, const Vector& d_val,
                           const Vector& u_del, double t);

/// Coefficients of the scalar benchmark
///   f = -a1 x - a2 tanh(xdot) - a3 xdot,   g = b1 sin(x_del) + b2 tanh(xdot_del).
/// a3 is a linear viscous term (zero by default).
struct ScalarCoeffs {
    double a1 = 1.0;
    double a2 = 1.0;
    double b1 = 0.5;
    double b2 = 0.5;
    double a3 = 0.0;

    /// Global Lipschitz constant of g: sup |b1 cos| + sup |b2 sech^2| = |b1| + |b2|.
    [[nodiscard]] double g_lipschitz() const;
    /// Global Lipschitz constant of f: |a1| + |a2| + |a3| (per argument, summed).
    [[nodiscard]] double f_lipschitz() const;
};

/// Reads {a1, a2, b1, b2[, a3]}; an empty list gives the defaults.
[[nodiscard]] ScalarCoeffs scalar_coeffs(const std::vector<double>& coeffs);
[[nodiscard]] PlantDynamics builtin_scalar(const ScalarCoeffs& c = {});

/// Two-link, Euler-Lagrange-like plant:
///   f = -M(x)^{-1} (K x + C xdot + h(x, xdot)),
///   M = [[1, m cos(x1 - x2)], [m cos(x1 - x2), 1]],
///   h = m sin(x1 - x2) [xdot2^2, -xdot1^2],
///   g = -[ks sin(x_del) + cs xdot_del] per joint (delayed stiffness).
struct TwoLinkCoeffs {
    double k1 = 2.0;
    double k2 = 1.5;
    double c1 = 1.0;
    double c2 = 0.8;
    double m = 0.3;   ///< inertial coupling, |m| < 1
    double ks = 0.4;  ///< delayed stiffness
    double cs = 0.2;  ///< delayed damping
};

/// Reads {k1, k2, c1, c2, m, ks, cs}; an empty list gives the defaults.
[[nodiscard]] TwoLinkCoeffs twolink_coeffs(const std::vector<double>& coeffs);
[[nodiscard]] PlantDynamics builtin_twolink(const TwoLinkCoeffs& c = {});

/// f = -k x - c xdot, g = 0. Coefficients {k, c}.
[[nodiscard]] PlantDynamics linear_plant(Eigen::Index dim, double k, double c);
/// f = g = 0.
[[nodiscard]] PlantDynamics zero_plant(Eigen::Index dim);

/// Looks up a registered plant: "scalar", "twolink", "linear", "zero".
[[nodiscard]] PlantDynamics make_plant(const std::string& name, const std::vector<double>& coeffs,
                                       Eigen::Index dim);
[[nodiscard]] std::vector<std::string> registered_plants();

/// d(t)_k = amplitude_k sin(frequency t + phase_k).
class Disturbance {
public:
    Disturbance(Vector amplitude, double frequency, Vector phase);
    static Disturbance none(Eigen::Index dim);

    [[nodiscard]] Vector operator()(double t) const;
    [[nodiscard]] Vector rate(double t) const;
    [[nodiscard]] double bound_d() const { return amplitude_.norm(); }
    [[nodiscard]] double bound_ddot() const { return amplitude_.norm() * std::abs(frequency_); }
    [[nodiscard]] Eigen::Index dim() const { return amplitude_.size(); }

private:
    Vector amplitude_;
    double frequency_;
    Vector phase_;
};

/// x_d(t)_k = offset_k + amplitude_k sin(frequency_k t + phase_k), with
/// analytic derivatives through order 3.
class DesiredTrajectory {
public:
    DesiredTrajectory(Vector offset, Vector amplitude, Vector frequency, Vector phase);
    static DesiredTrajectory hold(Vector value);

    /// order 0..3
    [[nodiscard]] Vector derivative(int order, double t) const;
    [[nodiscard]] Vector x(double t) const { return derivative(0, t); }
    [[nodiscard]] Vector xdot(double t) const { return derivative(1, t); }
    [[nodiscard]] Vector xddot(double t) const { return derivative(2, t); }

    /// Norm bound on the order-th derivative over all t.
    [[nodiscard]] double bound(int order) const;
    [[nodiscard]] Eigen::Index dim() const { return offset_.size(); }

private:
    Vector offset_;
    Vector amplitude_;
    Vector frequency_;
    Vector phase_;
};

}  // namespace delaycomp
