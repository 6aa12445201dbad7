#include <doctest.h>

#include "delaycomp/trajectory_history.hpp"

using namespace delaycomp;

namespace {
Vector v1(double a) { return Vector::Constant(1, a); }
}  // namespace

TEST_CASE("append grows the buffer and enforces strict time order") {
    SampleBuffer buf(0.0, v1(0.0));
    buf.append(0.1, v1(1.0));
    CHECK(buf.size() == 2);
    CHECK_THROWS_AS((void)buf.append(0.1, v1(2.0)), PreconditionError);
    CHECK_THROWS_AS((void)buf.append(0.05, v1(2.0)), PreconditionError);
}

TEST_CASE("append rejects wrong dimension and non-finite values") {
    SampleBuffer buf(0.0, v1(0.0));
    CHECK_THROWS_AS((void)buf.append(0.1, Vector::Zero(2)), PreconditionError);
    CHECK_THROWS_AS((void)buf.append(0.1, v1(std::nan(""))), PreconditionError);
    CHECK(buf.size() == 1);
}

TEST_CASE("eval interpolates and applies the zero-history convention") {
    SampleBuffer buf(0.0, v1(0.0));
    buf.append(1.0, v1(2.0));
    CHECK(buf.eval(0.5)[0] == doctest::Approx(1.0));
    CHECK(buf.eval(1.0)[0] == 2.0);
    CHECK(buf.eval(-1.0)[0] == 0.0);

    SampleBuffer shifted(0.0, v1(3.0));
    shifted.append(1.0, v1(5.0));
    CHECK(shifted.eval(0.0, Lookup::Delayed)[0] == 0.0);
    CHECK(shifted.eval(0.0, Lookup::Dense)[0] == 3.0);
    CHECK(shifted.eval(0.25)[0] == doctest::Approx(3.5));
    CHECK_THROWS_AS((void)shifted.eval(-0.5, Lookup::Dense), HistoryError);
}

TEST_CASE("eval past the newest sample is an error") {
    SampleBuffer buf(0.0, v1(0.0));
    buf.append(1.0, v1(1.0));
    CHECK_THROWS_AS((void)buf.eval(1.0 + 1e-9), HistoryError);
}

TEST_CASE("prune keeps the window plus the bracketing sample") {
    SampleBuffer buf(0.0, v1(0.0));
    for (int k = 1; k < 1000; ++k) {
        const double t = 10.0 * k / 999.0;
        buf.append(t, v1(t));
    }
    buf.prune(1.0);
    CHECK(buf.first_time() <= 9.0);
    CHECK(buf[1].t > 9.0);
    CHECK(buf.last_time() == 10.0);
    // Reads inside the window are unaffected.
    CHECK(buf.eval(9.5)[0] == doctest::Approx(9.5));
    // Reads into the pruned region fail rather than silently return zero.
    CHECK_THROWS_AS((void)buf.eval(5.0), HistoryError);
}

TEST_CASE("prune is a no-op for wide horizons and tiny buffers") {
    SampleBuffer one(0.0, v1(1.0));
    one.prune(0.0);
    CHECK(one.size() == 1);

    SampleBuffer buf(0.0, v1(0.0));
    for (int k = 1; k <= 10; ++k) buf.append(k, v1(k));
    buf.prune(100.0);
    CHECK(buf.size() == 11);
}

TEST_CASE("delayed_value: zero delay, clamping and counting") {
    SampleBuffer buf(0.0, v1(0.0));
    buf.append(1.0, v1(1.0));
    buf.append(2.0, v1(2.0));
    LookupStats stats;

    CHECK(delayed_value(buf, 2.5, 0.0, true, v1(7.0), &stats)[0] == 7.0);
    CHECK(delayed_value(buf, 2.0, 0.5, false, v1(7.0), &stats)[0] == doctest::Approx(1.5));
    CHECK(stats.clamped == 0);
    CHECK(delayed_value(buf, 2.5, 0.2, false, v1(7.0), &stats)[0] == 2.0);
    CHECK(stats.clamped == 1);
    CHECK(stats.lookups == 3);
    CHECK(delayed_value(buf, 0.5, 1.0, false, v1(7.0), &stats)[0] == 0.0);
}
