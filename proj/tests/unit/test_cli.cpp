#include <doctest.h>

#include "delaycomp/cli.hpp"
#include "delaycomp/output.hpp"

#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

using namespace delaycomp;
namespace fs = std::filesystem;

namespace {

const std::string kScenarios = DELAYCOMP_SCENARIO_DIR;
const std::string kGolden = DELAYCOMP_GOLDEN_DIR;

struct Run {
    int code;
    std::string out, err;
};

Run invoke(std::vector<std::string> args) {
    args.insert(args.begin(), "delaycomp");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = cli::main(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p, std::ios::binary);
    std::ostringstream ss;
    ss << is.rdbuf();
    return ss.str();
}

std::string first_line(const fs::path& p) {
    std::ifstream is(p);
    std::string line;
    std::getline(is, line);
    return line;
}

std::size_t line_count(const fs::path& p) {
    std::ifstream is(p);
    std::size_t n = 0;
    for (std::string line; std::getline(is, line);) ++n;
    return n;
}

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) {
        path = fs::temp_directory_path() / ("delaycomp_test_" + tag + "_" + std::to_string(::getpid()));
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
};

// Benchmark scenario with a shorter horizon for file tests.
fs::path short_benchmark(const TempDir& d, double t_end) {
    std::string text = slurp(kScenarios + "/scalar_remark2.toml");
    const auto pos = text.find("t_end = 60.0");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 12, "t_end = " + std::to_string(t_end));
    const fs::path p = d.path / "bench.toml";
    std::ofstream(p) << text;
    return p;
}

}  // namespace

TEST_CASE("golden headers") {
    CHECK(state_csv_header(1) + "\n" == slurp(kGolden + "/state_header_1.csv"));
    CHECK(state_csv_header(2) + "\n" == slurp(kGolden + "/state_header_2.csv"));
    CHECK(monitor_csv_header(1) + "\n" == slurp(kGolden + "/monitor_header_1.csv"));
    CHECK(sweep_csv_header() + "\n" == slurp(kGolden + "/sweep_header.csv"));
}

TEST_CASE("number formatting round-trips") {
    for (double v : {0.1, 1.0 / 3.0, -2.5e-300, 6.02214076e23}) {
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(INFINITY) == "inf");
    CHECK(format_double(-INFINITY) == "-inf");
    CHECK(format_double(NAN) == "nan");
}

TEST_CASE("check-gains on the benchmark passes in the global regime") {
    const auto r = invoke({"check-gains", kScenarios + "/scalar_remark2.toml"});
    CHECK(r.code == cli::kExitOk);
    CHECK(r.out.find("global (Remark 2)") != std::string::npos);
    CHECK(r.out.find("all conditions satisfied") != std::string::npos);
}

TEST_CASE("check-gains names the failing condition") {
    TempDir d("alpha2");
    std::string text = slurp(kScenarios + "/scalar_remark2.toml");
    text.replace(text.find("alpha2 = 2.5"), 12, "alpha2 = 1.0");
    const fs::path p = d.path / "bad.toml";
    std::ofstream(p) << text;
    const auto r = invoke({"check-gains", p.string()});
    CHECK(r.code == cli::kExitConditions);
    CHECK(r.out.find("FAIL  alpha2 > 2") != std::string::npos);
}

TEST_CASE("usage and config errors exit 2") {
    CHECK(invoke({"check-gains", "/nonexistent.toml"}).code == cli::kExitUsage);
    CHECK(invoke({}).code == cli::kExitUsage);
    CHECK(invoke({"frobnicate"}).code == cli::kExitUsage);
    CHECK(invoke({"simulate"}).code == cli::kExitUsage);

    TempDir d("badcfg");
    const fs::path p = d.path / "bad.toml";
    std::ofstream(p) << "[sim]\nt_end = 1\nbogus = 2\n";
    const auto r = invoke({"simulate", p.string()});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("line 3") != std::string::npos);
}

TEST_CASE("simulate writes state, monitor and report files") {
    TempDir d("sim");
    const auto cfg = short_benchmark(d, 2.0);
    const fs::path out = d.path / "out";
    const auto r = invoke({"simulate", cfg.string(), "--out", out.string()});
    CHECK(r.code == cli::kExitOk);
    REQUIRE(fs::exists(out / "state.csv"));
    REQUIRE(fs::exists(out / "monitor.csv"));
    REQUIRE(fs::exists(out / "report.txt"));
    CHECK(fs::exists(out / "report.kv"));
    CHECK(first_line(out / "state.csv") == state_csv_header(1));
    CHECK(first_line(out / "monitor.csv") == monitor_csv_header(1));
    CHECK(line_count(out / "state.csv") == 2002);
    CHECK(line_count(out / "monitor.csv") == 2002);
    CHECK(slurp(out / "report.kv").find("verdict=") != std::string::npos);
    CHECK(slurp(out / "report.txt").find("verdict") != std::string::npos);
}

TEST_CASE("simulate --no-monitor skips the monitor file") {
    TempDir d("nomon");
    const auto cfg = short_benchmark(d, 1.0);
    const fs::path out = d.path / "out";
    const auto r = invoke({"simulate", cfg.string(), "--out", out.string(), "--no-monitor"});
    CHECK(r.code == cli::kExitOk);
    CHECK(fs::exists(out / "state.csv"));
    CHECK_FALSE(fs::exists(out / "monitor.csv"));
    CHECK(r.out.find("verdict: completed") != std::string::npos);
}

TEST_CASE("simulate reports divergence with exit 3 and keeps partial output") {
    TempDir d("div");
    const fs::path out = d.path / "out";
    const auto r = invoke({"simulate", kScenarios + "/divergent.toml", "--out", out.string(), "--no-monitor"});
    CHECK(r.code == cli::kExitDiverged);
    CHECK(r.out.find("verdict: diverged") != std::string::npos);
    REQUIRE(fs::exists(out / "state.csv"));
    const auto rows = line_count(out / "state.csv");
    CHECK(rows > 100);
    CHECK(rows < 20002);
}

TEST_CASE("sweep writes one row per value") {
    TempDir d("sweep");
    const auto cfg = short_benchmark(d, 1.0);
    const fs::path out = d.path / "out";
    const auto r = invoke({"sweep", cfg.string(), "--axis", "controller.input_delay_scale", "--values",
                           "0.8,1.0,1.2", "--out", out.string()});
    CHECK(r.code == cli::kExitOk);
    REQUIRE(fs::exists(out / "sweep.csv"));
    CHECK(line_count(out / "sweep.csv") == 4);
    CHECK(first_line(out / "sweep.csv") == sweep_csv_header());
}

TEST_CASE("sweep rejects unknown axes and empty value lists") {
    TempDir d("sweepbad");
    const auto cfg = short_benchmark(d, 1.0);
    auto r = invoke({"sweep", cfg.string(), "--axis", "gains.bogus", "--values", "1,2"});
    CHECK(r.code == cli::kExitUsage);
    CHECK(r.err.find("gains.ks") != std::string::npos);
    r = invoke({"sweep", cfg.string(), "--axis", "gains.ks", "--values", ""});
    CHECK(r.code == cli::kExitUsage);
    r = invoke({"sweep", cfg.string(), "--axis", "gains.ks", "--values", "1,x"});
    CHECK(r.code == cli::kExitUsage);
}

TEST_CASE("value lists") {
    CHECK(cli::parse_value_list("1, 2.5 ,-3e-2") == std::vector<double>{1.0, 2.5, -0.03});
    CHECK_THROWS_AS((void)cli::parse_value_list(""), ConfigError);
    CHECK_THROWS_AS((void)cli::parse_value_list("1,,2"), ConfigError);
}
