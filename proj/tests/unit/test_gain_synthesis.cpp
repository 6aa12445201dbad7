#include <doctest.h>

#include "delaycomp/gain_synthesis.hpp"

#include <cmath>

using namespace delaycomp;

namespace {

bool rel_close(double a, double b, double tol = 1e-9) {
    return std::abs(a - b) <= tol * std::max(std::abs(a), std::abs(b));
}

GainSet gains(double a1, double a2, double ks, double g1, double g2, double w) {
    return GainSet{a1, a2, ks, g1, g2, w};
}

// rho(s) = s exactly: rho1 = s/sqrt(3), rho2 = 0.
BoundingData identity_rho(double zeta) {
    BoundingData b;
    b.rho1 = [](double s) { return s / std::sqrt(3.0); };
    b.rho2 = [](double) { return 0.0; };
    b.zeta_nd1 = zeta;
    return b;
}

// Roots of 6 (w + 1) phi (k + 1)^2 = k, the edges of the delay condition.
std::pair<double, double> cond1_roots(double phi, double w) {
    const double c = 6.0 * (w + 1.0) * phi;
    // c k^2 + (2c - 1) k + c = 0
    const double disc = (2.0 * c - 1.0) * (2.0 * c - 1.0) - 4.0 * c * c;
    const double s = std::sqrt(disc);
    return {(1.0 - 2.0 * c - s) / (2.0 * c), (1.0 - 2.0 * c + s) / (2.0 * c)};
}

}  // namespace

TEST_CASE("rho") {
    const auto g = gains(2, 3, 1, 3, 1, 1);
    const DelayBounds d{0.0, 0.0, 0.2, 0.0};
    CHECK(rel_close(rho(0.7, g, BoundingData::constant(1, 1, 0), d), std::sqrt(6.4)));
    CHECK(rel_close(rho(0.7, g, BoundingData::constant(1, 1, 0), d), 2.5298221281347035));
    CHECK(rho(3.0, g, BoundingData::constant(0, 0, 0), d) == 0.0);
}

TEST_CASE("sigma") {
    const DelayBounds d{0.1, 0.5, 0.0, 0.0};
    CHECK(rel_close(sigma(gains(2, 4, 1, 3, 1, 1), d), 5.0 / 12.0));
    CHECK(rel_close(sigma(gains(2, 4, 1, 3, 1, 1e9), d), 0.5 * std::min({1.0, 2.0, 1.0})));
    CHECK(rel_close(sigma(gains(2, 2, 1, 3, 1, 1e9), d), 0.5));
    CHECK(rel_close(sigma(gains(1.2, 4, 1, 3, 1, 1e9), d), 0.3));
    // A zero input-delay bound drops the last term.
    CHECK(rel_close(sigma(gains(3, 4, 1, 3, 1, 1), DelayBounds{}), 0.5));
}

TEST_CASE("delta") {
    const auto g = gains(2, 4, 1, 3, 1, 1);
    const DelayBounds d{0.1, 0.5, 0.2, 0.5};
    const double s = sigma(g, d);
    // min{5/12, 5/3, 5/3, 1/6, 5/4} / 2
    CHECK(rel_close(delta(g, d, s), 1.0 / 12.0));
    // gamma2 >> gamma1 and wide delay margins leave sigma as the minimum.
    CHECK(rel_close(delta(gains(2, 4, 1, 3, 100, 1), DelayBounds{0.01, 0.0, 0.01, 0.0}, s), s / 2));
    CHECK(rel_close(delta(gains(2, 4, 1, 3, 100, 1), DelayBounds{}, s), s / 2));
}

TEST_CASE("gain conditions are strict") {
    const DelayBounds d{0.1, 0.2, 0.0, 0.5};
    const auto all = check_gain_conditions(gains(2, 3, 1, 3, 1, 1), d);
    REQUIRE(all.size() == 4);
    for (const auto& c : all) CHECK(c.passed);
    CHECK(rel_close(all[2].lhs, 2.0));
    CHECK(rel_close(all[3].lhs, 0.375));

    CHECK_FALSE(check_gain_conditions(gains(1, 3, 1, 3, 1, 1), d)[0].passed);
    const auto edge = check_gain_conditions(gains(2, 3, 1, 2.0, 1, 1), d);
    CHECK_FALSE(edge[2].passed);
    CHECK(edge[2].margin == 0.0);
    CHECK(check_gain_conditions(gains(2, 1, 1, 3, 1, 1), d)[1].name == "alpha2 > 2");
}

TEST_CASE("delay condition on phi_i1") {
    auto c = check_delay_cond1(gains(2, 3, 1, 3, 1, 1), DelayBounds{0.1, 0, 0, 0});
    CHECK(rel_close(c.rhs, 1.0 / 48.0));
    CHECK_FALSE(c.passed);

    c = check_delay_cond1(gains(2, 3, 1, 3, 1, 0.05), DelayBounds{0.01, 0, 0, 0});
    CHECK(rel_close(c.rhs, 1.0 / (6.0 * 1.05 * 4.0)));
    CHECK(c.passed);

    for (double ks : {1e-3, 1.0, 1e3}) {
        CHECK(check_delay_cond1(gains(2, 3, ks, 3, 1, 1), DelayBounds{}).passed);
    }
}

TEST_CASE("radius condition") {
    // Constant rho below the threshold: the inverse image is empty.
    const auto g = gains(2, 4, 10, 3, 1, 1);
    const DelayBounds d{0.1, 0.5, 0.2, 0.5};
    const auto r = check_delay_cond2(g, d, BoundingData::constant(1, 1, 100.0), 5.0 / 12.0, 1.0 / 12.0);
    CHECK(std::isinf(r.radius));
    CHECK(r.condition.passed);
    CHECK(rel_close(r.threshold, std::sqrt(25.0 / 3.0)));

    const auto gi = gains(2, 4, 2, 3, 1, 1);
    const auto id = check_delay_cond2(gi, DelayBounds{}, identity_rho(0.1), 0.5, 0.1);
    CHECK(rel_close(id.radius, std::sqrt(2.0), 1e-9));
    CHECK(rel_close(id.condition.lhs, 0.15));
    CHECK(id.condition.passed);

    CHECK_FALSE(check_delay_cond2(gi, DelayBounds{}, identity_rho(1e6), 0.5, 0.1).condition.passed);
}

TEST_CASE("constant-bound test") {
    BoundingData b = BoundingData::constant(1, 1, 0.1);
    b.rho_bar = 2.529822128134704;
    const double s = 5.0 / 12.0;
    const auto r = check_remark2(gains(2, 4, 4, 3, 1, 1), b, s);
    CHECK(r.applicable);
    CHECK(rel_close(r.threshold, 2.529822128134704 * 6.0 / 5.0));
    CHECK(rel_close(r.threshold, 3.0357865537616448));
    CHECK(r.passed);
    CHECK(r.global);

    const auto edge = check_remark2(gains(2, 4, r.threshold, 3, 1, 1), b, s);
    CHECK_FALSE(edge.passed);

    CHECK_FALSE(check_remark2(gains(2, 4, 4, 3, 1, 1), BoundingData::constant(1, 1, 0), s).applicable);
}

TEST_CASE("ultimate bound and decay radius") {
    const auto g = gains(2, 4, 1, 3, 1, 1);
    CHECK(rel_close(ultimate_bound(g, BoundingData::constant(1, 1, 0.1), 1.0 / 12.0), 0.6));
    CHECK(rel_close(decay_radius(g, BoundingData::constant(1, 1, 0.1), 1.0 / 12.0), 0.6 / std::sqrt(2.0)));
    CHECK(ultimate_bound(g, BoundingData::constant(1, 1, 0.0), 1.0 / 12.0) == 0.0);
}

TEST_CASE("region radii") {
    const auto rr = region_radii(gains(2, 4, 2, 3, 1, 1), identity_rho(0.1), DelayBounds{}, 0.5);
    CHECK(rel_close(rr.r_D, std::sqrt(2.0)));
    CHECK(rel_close(rr.r_SD, 1.0));

    BoundingData b = BoundingData::constant(1, 1, 0.1);
    b.rho_bar = 2.529822128134704;
    const auto g = region_radii(gains(2, 4, 4, 3, 1, 1), b, DelayBounds{}, 5.0 / 12.0);
    CHECK(std::isinf(g.r_D));
    CHECK(std::isinf(g.r_SD));
}

TEST_CASE("first crossing radius") {
    CHECK(first_crossing_radius([](double s) { return s * s; }, 4.0) == doctest::Approx(2.0).epsilon(1e-9));
    CHECK(first_crossing_radius([](double) { return 5.0; }, 4.0) == 0.0);
    CHECK(std::isinf(first_crossing_radius([](double s) { return 1.0 - std::exp(-s); }, 2.0)));
}

TEST_CASE("feasible ks interval, constant-bound regime") {
    BoundingData b = BoundingData::constant(1, 1, 0.1);
    b.rho_bar = 2.529822128134704;
    const DelayBounds d{0.002, 0.0, 0.2, 0.5};
    const auto partial = gains(2, 4, 1, 3, 1, 0.05);
    const auto iv = search_feasible_ks(d, b, partial);
    REQUIRE(iv);
    CHECK(iv->lo < 4.0);
    CHECK(iv->hi > 4.0);

    // Independent edges: rho_bar/(2 sigma) below, the delay-condition root above.
    const double s = sigma(partial, d);
    CHECK(rel_close(iv->lo, *b.rho_bar / (2.0 * s), 1e-6));
    CHECK(rel_close(iv->hi, cond1_roots(0.002, 0.05).second, 1e-6));
}

TEST_CASE("feasible ks interval, other cases") {
    const auto partial = gains(2, 4, 1, 3, 1, 2.0);
    // max over ks of ks/(6(w+1)(ks+1)^2) is 1/(24(w+1)) at ks = 1.
    CHECK_FALSE(search_feasible_ks(DelayBounds{0.5, 0.0, 0.0, 0.0}, identity_rho(0.0), partial));

    // zeta = 0 and rho(0) = 0: only the delay condition bounds ks.
    const DelayBounds d{0.01, 0.0, 0.0, 0.0};
    const auto iv = search_feasible_ks(d, identity_rho(0.0), partial);
    REQUIRE(iv);
    const auto [lo, hi] = cond1_roots(0.01, 2.0);
    CHECK(rel_close(iv->lo, lo, 1e-6));
    CHECK(rel_close(iv->hi, hi, 1e-6));

    CHECK_THROWS_AS((void)search_feasible_ks(d, identity_rho(0.0), gains(0.5, 4, 1, 3, 1, 2)),
                    PreconditionError);
}

TEST_CASE("evaluate_conditions gates on the constant-bound test when available") {
    BoundingData b = BoundingData::constant(1, 1, 0.1);
    b.rho_bar = 2.529822128134704;
    const DelayBounds d{0.002, 0.0, 0.2, 0.5};
    const auto ok = evaluate_conditions(gains(2, 4, 4, 3, 1, 0.05), d, b);
    CHECK(ok.all_passed());
    CHECK(ok.global());
    CHECK(ok.gating_conditions().back().name == "ks > rho_bar/(2 sigma)");

    const double edge = *b.rho_bar / (2.0 * sigma(gains(2, 4, 1, 3, 1, 0.05), d));
    const auto low = evaluate_conditions(gains(2, 4, 0.9 * edge, 3, 1, 0.05), d, b);
    CHECK_FALSE(low.all_passed());

    BoundingData bad;
    bad.rho1 = [](double s) { return 1.0 / (1.0 + s); };
    bad.rho2 = [](double) { return 0.0; };
    CHECK_THROWS_AS((void)evaluate_conditions(gains(2, 4, 4, 3, 1, 0.05), d, bad), PreconditionError);
}
