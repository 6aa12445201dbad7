#include <doctest.h>

#include "delaycomp/output.hpp"
#include "delaycomp/scenario.hpp"
#include "delaycomp/sim_engine.hpp"

#include <cmath>
#include <cstdlib>
#include <sstream>

using namespace delaycomp;

namespace {

const std::string kScenarios = DELAYCOMP_SCENARIO_DIR;

Scenario benchmark() { return load_scenario(kScenarios + "/scalar_remark2.toml"); }

std::string state_csv(const SimResult& r, Eigen::Index dim) {
    std::ostringstream os;
    write_state_csv(os, r.rows, dim);
    return os.str();
}

}  // namespace

TEST_CASE("zero plant at rest stays at rest") {
    SimConfig c;
    c.plant = zero_plant(1);
    c.t_end = 2.0;
    c.h = 0.01;
    c.input_delay = DelayProfile::constant(0.05);
    c.state_delay = DelayProfile::constant(0.1);
    c.monitor_enabled = false;
    const auto r = run(c);
    REQUIRE(r.rows.size() == 201);
    for (const auto& row : r.rows) {
        CHECK(row.x.norm() == 0.0);
        CHECK(row.xdot.norm() == 0.0);
        CHECK(row.u.norm() == 0.0);
    }
}

TEST_CASE("rows are uniformly spaced from t0 to t_end inclusive") {
    SimConfig c;
    c.t0 = 1.0;
    c.t_end = 3.0;
    c.h = 0.004;
    c.initial_x = Vector::Constant(1, 0.5);
    c.monitor_enabled = false;
    const auto r = run(c);
    REQUIRE(r.rows.size() == 501);
    CHECK(r.rows.front().t == 1.0);
    CHECK(r.rows.back().t == doctest::Approx(3.0).epsilon(1e-14));
    for (std::size_t k = 1; k < r.rows.size(); ++k) {
        CHECK(r.rows[k].t - r.rows[k - 1].t == doctest::Approx(0.004).epsilon(1e-9));
    }
}

TEST_CASE("delay-free smooth loop converges at fourth order") {
    const auto base = load_scenario(kScenarios + "/delay_free_linear.toml").sim;
    std::vector<double> end_x;
    for (double h : {0.02, 0.01, 0.005}) {
        SimConfig c = base;
        c.h = h;
        const auto r = run(c);
        CHECK(r.lookups.clamped == 0);
        end_x.push_back(r.rows.back().x[0]);
    }
    const double order = std::log2(std::abs(end_x[0] - end_x[1]) / std::abs(end_x[1] - end_x[2]));
    CHECK(order >= 3.8);
}

TEST_CASE("a delay of 3h never reads past the integration frontier") {
    SimConfig c;
    c.h = 0.001;
    c.t_end = 2.0;
    c.initial_x = Vector::Constant(1, 1.0);
    c.input_delay = DelayProfile::constant(0.003);
    c.state_delay = DelayProfile::constant(0.003);
    c.monitor_enabled = false;
    const auto r = run(c);
    CHECK(r.lookups.lookups > 0);
    CHECK(r.lookups.clamped == 0);
    CHECK_FALSE(r.reduced_order);
}

TEST_CASE("a delay shorter than a half step is clamped and labeled") {
    SimConfig c;
    c.h = 0.01;
    c.t_end = 1.0;
    c.initial_x = Vector::Constant(1, 1.0);
    c.input_delay = DelayProfile::constant(0.002);
    c.monitor_enabled = false;
    const auto r = run(c);
    CHECK(r.lookups.clamped > 0);
    CHECK(r.reduced_order);
    const auto labels = r.labels();
    CHECK(std::find(labels.begin(), labels.end(), "reduced-order accuracy") != labels.end());
}

TEST_CASE("identical configs give bit-identical output") {
    SimConfig c = benchmark().sim;
    c.t_end = 3.0;
    c.init_jitter = 0.1;
    c.seed = 42;
    const auto a = run(c);
    const auto b = run(c);
    CHECK(state_csv(a, 1) == state_csv(b, 1));

    c.seed = 43;
    const auto other = run(c);
    CHECK(other.rows.front().x[0] != a.rows.front().x[0]);
}

TEST_CASE("undelayed, undisturbed regulation drives e1 to zero") {
    SimConfig c = benchmark().sim;
    c.input_delay = DelayProfile::constant(0.0);
    c.state_delay = DelayProfile::constant(0.0);
    c.disturbance = Disturbance::none(1);
    c.trajectory = DesiredTrajectory::hold(Vector::Constant(1, 0.5));
    c.t_end = 20.0;
    c.monitor_enabled = false;
    const auto r = run(c);
    const double e0 = r.rows.front().e1.norm();
    CHECK(e0 > 0.5);
    CHECK(r.rows.back().e1.norm() < 1e-2 * e0);
}

TEST_CASE("violated gain condition still runs and is labeled") {
    SimConfig c = benchmark().sim;
    c.gains.alpha1 = 0.5;
    const auto r = run(c);
    CHECK_FALSE(r.diverged);
    CHECK_FALSE(r.conditions_ok);
    CHECK(r.labels().front() == "conditions not satisfied");
    CHECK(r.verdict() != "certified");
}

TEST_CASE("divergent scenario stops early with partial rows") {
    const auto sc = load_scenario(kScenarios + "/divergent.toml");
    SimConfig c = sc.sim;
    c.monitor_enabled = false;
    const auto r = run(c);
    CHECK(r.diverged);
    CHECK(r.verdict() == "diverged");
    CHECK(r.rows.size() > 100);
    CHECK(r.rows.back().t < c.t_end);
}

TEST_CASE("sweep keeps order, records failures and handles empty input") {
    const auto base = benchmark();
    CHECK(sweep({}, [&](double) { return base.sim; }).empty());

    auto make = [&](double v) {
        if (v < 0) throw ConfigError("negative");
        SimConfig c = base.sim;
        c.t_end = 1.0;
        c.gains.ks = v;
        return c;
    };
    const auto rows = sweep({5.0, -1.0, 8.0}, make, 2);
    REQUIRE(rows.size() == 3);
    CHECK(rows[0].value == 5.0);
    CHECK(rows[1].verdict == "error");
    CHECK(rows[1].error == "negative");
    CHECK(rows[2].value == 8.0);
    CHECK(rows[2].error.empty());
}

TEST_CASE("DELAYCOMP_THREADS caps the sweep workers") {
    ::setenv("DELAYCOMP_THREADS", "1", 1);
    CHECK(sweep_threads() == 1);
    ::unsetenv("DELAYCOMP_THREADS");
    CHECK(sweep_threads() >= 1);
}

TEST_CASE("growing the input-delay bound flips the verdict") {
    const auto base = benchmark();
    const auto rows = sweep({0.006, 0.02},
                            [&](double v) { return with_override(base, "delays.input.phi1", v).sim; });
    REQUIRE(rows.size() == 2);
    CHECK(rows[0].verdict == "certified");
    CHECK(rows[0].conditions_ok);
    CHECK(rows[1].verdict == "bounded (uncertified)");
    CHECK_FALSE(rows[1].conditions_ok);
}

TEST_CASE("ks sweep verdicts follow the feasible interval") {
    const auto base = benchmark();
    const auto& c = base.sim;
    const auto iv = search_feasible_ks(delay_bounds(c), c.bounding, c.gains);
    REQUIRE(iv);
    const std::vector<double> ks = {iv->lo * 0.9, iv->lo * 1.1, iv->hi * 0.9, iv->hi * 1.1};
    const auto rows = sweep(ks, [&](double v) { return with_override(base, "gains.ks", v).sim; });
    CHECK(rows[0].verdict == "bounded (uncertified)");
    CHECK(rows[1].verdict == "certified");
    CHECK(rows[2].verdict == "certified");
    CHECK(rows[3].verdict == "bounded (uncertified)");
    CHECK_FALSE(rows[0].conditions_ok);
    CHECK_FALSE(rows[3].conditions_ok);
}
