#include "delaycomp/plant.hpp"

#include <cmath>
#include <sstream>

namespace delaycomp {

Vector accel(const PlantDynamics& p, const Vector& x, const Vector& xdot, const Vector& x_del,
             const Vector& xdot_del, const Vector& d_val, const Vector& u_del, double t) {
    const auto n = p.dim;
    if (x.size() != n || xdot.size() != n || x_del.size() != n || xdot_del.size() != n ||
        d_val.size() != n || u_del.size() != n) {
        throw PreconditionError("accel: argument dimension does not match plant dimension " +
                                std::to_string(n));
    }
    Vector out = p.f(x, xdot, t) + p.g(x_del, xdot_del, t) + d_val + u_del;
    if (!all_finite(out)) {
        std::ostringstream msg;
        msg.precision(17);
        msg << "plant '" << p.name << "' produced a non-finite acceleration at t=" << t;
        throw DivergenceError(msg.str());
    }
    return out;
}

double ScalarCoeffs::g_lipschitz() const { return std::abs(b1) + std::abs(b2); }

double ScalarCoeffs::f_lipschitz() const { return std::abs(a1) + std::abs(a2) + std::abs(a3); }

ScalarCoeffs scalar_coeffs(const std::vector<double>& coeffs) {
    ScalarCoeffs c;
    if (coeffs.empty()) return c;
    if (coeffs.size() != 4 && coeffs.size() != 5) {
        throw PreconditionError("scalar plant takes coefficients {a1, a2, b1, b2[, a3]}");
    }
    c.a1 = coeffs[0];
    c.a2 = coeffs[1];
    c.b1 = coeffs[2];
    c.b2 = coeffs[3];
    if (coeffs.size() == 5) c.a3 = coeffs[4];
    return c;
}

PlantDynamics builtin_scalar(const ScalarCoeffs& c) {
    PlantDynamics p;
    p.dim = 1;
    p.name = "scalar";
    p.f = [c](const Vector& x, const Vector& xdot, double) {
        Vector out(1);
        out[0] = -c.a1 * x[0] - c.a2 * std::tanh(xdot[0]) - c.a3 * xdot[0];
        return out;
    };
    p.g = [c](const Vector& x, const Vector& xdot, double) {
        Vector out(1);
        out[0] = c.b1 * std::sin(x[0]) + c.b2 * std::tanh(xdot[0]);
        return out;
    };
    return p;
}

TwoLinkCoeffs twolink_coeffs(const std::vector<double>& coeffs) {
    TwoLinkCoeffs c;
    if (coeffs.empty()) return c;
    if (coeffs.size() != 7) {
        throw PreconditionError("twolink plant takes coefficients {k1, k2, c1, c2, m, ks, cs}");
    }
    c = TwoLinkCoeffs{coeffs[0], coeffs[1], coeffs[2], coeffs[3], coeffs[4], coeffs[5], coeffs[6]};
    if (!(std::abs(c.m) < 1.0)) {
        throw PreconditionError("twolink coupling m must satisfy |m| < 1");
    }
    return c;
}

PlantDynamics builtin_twolink(const TwoLinkCoeffs& c) {
    PlantDynamics p;
    p.dim = 2;
    p.name = "twolink";
    p.f = [c](const Vector& x, const Vector& xdot, double) {
        const double q = x[0] - x[1];
        const double mc = c.m * std::cos(q);
        const double ms = c.m * std::sin(q);
        Eigen::Vector2d rhs(c.k1 * x[0] + c.c1 * xdot[0] + ms * xdot[1] * xdot[1],
                            c.k2 * x[1] + c.c2 * xdot[1] - ms * xdot[0] * xdot[0]);
        // M = [[1, mc], [mc, 1]] is positive definite for |m| < 1.
        const double det = 1.0 - mc * mc;
        Vector out(2);
        out[0] = -(rhs[0] - mc * rhs[1]) / det;
        out[1] = -(rhs[1] - mc * rhs[0]) / det;
        return out;
    };
    p.g = [c](const Vector& x, const Vector& xdot, double) {
        Vector out(2);
        for (int k = 0; k < 2; ++k) out[k] = -(c.ks * std::sin(x[k]) + c.cs * xdot[k]);
        return out;
    };
    return p;
}

PlantDynamics linear_plant(Eigen::Index dim, double k, double c) {
    PlantDynamics p;
    p.dim = dim;
    p.name = "linear";
    p.f = [k, c](const Vector& x, const Vector& xdot, double) -> Vector { return -k * x - c * xdot; };
    p.g = [dim](const Vector&, const Vector&, double) -> Vector { return Vector::Zero(dim); };
    return p;
}

PlantDynamics zero_plant(Eigen::Index dim) {
    PlantDynamics p = linear_plant(dim, 0.0, 0.0);
    p.name = "zero";
    return p;
}

PlantDynamics make_plant(const std::string& name, const std::vector<double>& coeffs,
                         Eigen::Index dim) {
    if (name == "scalar") {
        if (dim != 1) throw PreconditionError("plant 'scalar' has dimension 1");
        return builtin_scalar(scalar_coeffs(coeffs));
    }
    if (name == "twolink") {
        if (dim != 2) throw PreconditionError("plant 'twolink' has dimension 2");
        return builtin_twolink(twolink_coeffs(coeffs));
    }
    if (name == "linear") {
        if (coeffs.size() != 2) throw PreconditionError("plant 'linear' takes coefficients {k, c}");
        return linear_plant(dim, coeffs[0], coeffs[1]);
    }
    if (name == "zero") {
        if (!coeffs.empty()) throw PreconditionError("plant 'zero' takes no coefficients");
        return zero_plant(dim);
    }
    throw PreconditionError("unknown plant '" + name + "'");
}

std::vector<std::string> registered_plants() { return {"scalar", "twolink", "linear", "zero"}; }

Disturbance::Disturbance(Vector amplitude, double frequency, Vector phase)
    : amplitude_(std::move(amplitude)), frequency_(frequency), phase_(std::move(phase)) {
    if (amplitude_.size() != phase_.size()) {
        throw PreconditionError("disturbance amplitude and phase differ in dimension");
    }
}

Disturbance Disturbance::none(Eigen::Index dim) {
    return Disturbance(Vector::Zero(dim), 0.0, Vector::Zero(dim));
}

Vector Disturbance::operator()(double t) const {
    return amplitude_.array() * (frequency_ * t + phase_.array()).sin();
}

Vector Disturbance::rate(double t) const {
    return frequency_ * (amplitude_.array() * (frequency_ * t + phase_.array()).cos()).matrix();
}

DesiredTrajectory::DesiredTrajectory(Vector offset, Vector amplitude, Vector frequency, Vector phase)
    : offset_(std::move(offset)),
      amplitude_(std::move(amplitude)),
      frequency_(std::move(frequency)),
      phase_(std::move(phase)) {
    const auto n = offset_.size();
    if (amplitude_.size() != n || frequency_.size() != n || phase_.size() != n) {
        throw PreconditionError("desired trajectory: offset, amplitude, frequency, phase differ in dimension");
    }
}

DesiredTrajectory DesiredTrajectory::hold(Vector value) {
    const auto n = value.size();
    return DesiredTrajectory(std::move(value), Vector::Zero(n), Vector::Zero(n), Vector::Zero(n));
}

Vector DesiredTrajectory::derivative(int order, double t) const {
    const auto arg = (frequency_.array() * t + phase_.array()).eval();
    const auto w = frequency_.array();
    switch (order) {
        case 0: return offset_ + (amplitude_.array() * arg.sin()).matrix();
        case 1: return (amplitude_.array() * w * arg.cos()).matrix();
        case 2: return (-amplitude_.array() * w.square() * arg.sin()).matrix();
        case 3: return (-amplitude_.array() * w.cube() * arg.cos()).matrix();
        default: throw PreconditionError("desired trajectory derivatives are available up to order 3");
    }
}

double DesiredTrajectory::bound(int order) const {
    if (order < 0 || order > 3) {
        throw PreconditionError("desired trajectory derivatives are available up to order 3");
    }
    if (order == 0) return (offset_.array().abs() + amplitude_.array().abs()).matrix().norm();
    return (amplitude_.array().abs() * frequency_.array().abs().pow(order)).matrix().norm();
}

}  // namespace delaycomp
