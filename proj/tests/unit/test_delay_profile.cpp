#include <doctest.h>

#include "delaycomp/delay_profile.hpp"

#include <cmath>
#include <numbers>

using namespace delaycomp;
using doctest::Approx;

TEST_CASE("tau and tau_rate for constant and sinusoidal profiles") {
    const auto c = DelayProfile::constant(0.05);
    CHECK(c.tau(0.0) == 0.05);
    CHECK(c.tau(123.4) == 0.05);
    CHECK(c.tau_rate(7.0) == 0.0);

    const auto s = DelayProfile::sinusoidal(0.05, 0.02, 1.0);
    CHECK(s.tau(0.0) == Approx(0.05));
    CHECK(s.tau(std::numbers::pi / 2) == Approx(0.07));
    CHECK(s.tau_rate(0.0) == Approx(0.02));
    CHECK(s.tau_rate(std::numbers::pi / 2) == Approx(0.0).epsilon(1e-12));
    CHECK(s.phi1() == Approx(0.07));
    CHECK(s.phi2() == Approx(0.02));
}

TEST_CASE("table profile interpolates and holds its end values") {
    const auto p = DelayProfile::table({0.0, 1.0, 3.0}, {0.1, 0.3, 0.2}, 0.3, 0.2);
    CHECK(p.tau(-1.0) == Approx(0.1));
    CHECK(p.tau(0.5) == Approx(0.2));
    CHECK(p.tau(2.0) == Approx(0.25));
    CHECK(p.tau(10.0) == Approx(0.2));
    CHECK(p.tau_rate(0.5) == Approx(0.2));
    CHECK(p.tau_rate(1.0) == Approx(-0.05));  // right derivative at a breakpoint
    CHECK(p.tau_rate(5.0) == 0.0);
    CHECK_THROWS_AS((void)DelayProfile::table({0.0, 0.0}, {0.1, 0.2}, 1.0, 1.0), PreconditionError);
    CHECK_THROWS_AS((void)DelayProfile::table({0.0}, {0.1}, 1.0, 1.0), PreconditionError);
}

TEST_CASE("validate_input_delay") {
    CHECK(validate_input_delay(DelayProfile::sinusoidal(0.03, 0.02, 1.0, 0.05, 0.02)).passed());

    const auto sum = validate_input_delay(DelayProfile::constant(0.5, 0.6, 0.5));
    REQUIRE_FALSE(sum.passed());
    CHECK(sum.first_failure()->condition == "phi1 + phi2 < 1");

    const auto rate = validate_input_delay(DelayProfile::constant(0.05, 0.05, 1.0));
    REQUIRE_FALSE(rate.passed());
    CHECK(rate.first_failure()->condition == "phi2 < 1");
}

TEST_CASE("validate_state_delay catches declared bounds that are too small") {
    // tau peaks at 0.07 and its rate at 0.02.
    const auto low_phi1 = validate_state_delay(DelayProfile::sinusoidal(0.05, 0.02, 1.0, 0.06, 0.02));
    REQUIRE_FALSE(low_phi1.passed());
    CHECK(low_phi1.first_failure()->condition == "tau <= phi1");
    CHECK(low_phi1.first_failure()->value == Approx(0.07).epsilon(1e-6));

    const auto low_phi2 = validate_state_delay(DelayProfile::sinusoidal(0.05, 0.02, 1.0, 0.07, 0.01));
    REQUIRE_FALSE(low_phi2.passed());
    CHECK(low_phi2.first_failure()->condition == "|tau_rate| <= phi2");

    const auto negative = validate_state_delay(DelayProfile::sinusoidal(0.01, 0.02, 1.0, 0.03, 0.02));
    REQUIRE_FALSE(negative.passed());
    CHECK(negative.first_failure()->condition == "tau >= 0");

    // phi2 < 1 is all a state delay needs beyond the bounds themselves.
    CHECK(validate_state_delay(DelayProfile::constant(0.6, 0.6, 0.5)).passed());
}

TEST_CASE("scaled profile multiplies delay, rate and bounds") {
    const auto s = DelayProfile::sinusoidal(0.05, 0.02, 1.0).scaled(1.2);
    CHECK(s.tau(std::numbers::pi / 2) == Approx(0.084));
    CHECK(s.tau_rate(0.0) == Approx(0.024));
    CHECK(s.phi1() == Approx(0.084));
    CHECK(s.phi2() == Approx(0.024));
    CHECK(DelayProfile::constant(0.3).scaled(0.0).identically_zero());
}

TEST_CASE("history activation time solves t - tau(t) = t0") {
    CHECK(history_activation_time(DelayProfile::constant(0.25), 1.0) == Approx(1.25));
    const auto s = DelayProfile::sinusoidal(0.1, 0.05, 0.5);
    const double ta = history_activation_time(s, 0.0);
    CHECK(ta - s.tau(ta) == Approx(0.0).epsilon(1e-12));
    CHECK(history_activation_time(DelayProfile::constant(0.0), 2.0) == 2.0);
}

TEST_CASE("kind names round-trip") {
    for (auto k : {DelayKind::Constant, DelayKind::Sinusoidal, DelayKind::Table}) {
        CHECK(delay_kind_from_string(to_string(k)) == k);
    }
    CHECK_THROWS_AS((void)delay_kind_from_string("cubic"), PreconditionError);
}
