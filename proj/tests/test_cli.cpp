// End-to-end checks of the command-line tool: exit codes, file emission,
// determinism. The binary path comes from the PAIRSIRS_CLI environment
// variable set by CTest.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "pairsirs/fastslow.hpp"

namespace fs = std::filesystem;
using namespace pairsirs;

namespace {

std::string cli() {
    const char* p = std::getenv("PAIRSIRS_CLI");
    REQUIRE_MESSAGE(p != nullptr, "PAIRSIRS_CLI not set");
    return p;
}

int run(const std::string& args) {
    const std::string cmd = cli() + " " + args + " >/dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WEXITSTATUS(rc);
}

std::string slurp(const fs::path& p) {
    std::ifstream is(p);
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() / ("pairsirs_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

} // namespace

TEST_CASE("missing required flag: exit 2, no file written") {
    TempDir tmp;
    const auto out = tmp.file("t.csv");
    CHECK(run("integrate --system slow --out " + out) == 2);  // --S missing
    CHECK_FALSE(fs::exists(out));
}

TEST_CASE("invalid system name: exit 2") {
    CHECK(run("integrate --system nonsense --S 0.5") == 2);
}

TEST_CASE("integrate slow: CSV matches the closed-form solution") {
    TempDir tmp;
    const auto out = tmp.file("slow.csv");
    REQUIRE(run("integrate --system slow --S 0.5 --SS 1 --n 4 --tmax 5 --store-dt 0.5 --out " + out) == 0);
    std::ifstream is(out);
    std::string line;
    bool saw_header = false;
    Params p{2.0, 1.0, 0.0, 4.0};
    int rows = 0;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            CHECK(line == "t,S,SS");
            saw_header = true;
            continue;
        }
        double t, S, SS;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf", &t, &S, &SS) == 3);
        const SlowPoint exact = slow_solution({0.5, 1.0}, t, p);
        CHECK(std::fabs(S - exact.S) <= 1e-8);
        CHECK(std::fabs(SS - exact.SS) <= 1e-8);
        ++rows;
    }
    CHECK(rows >= 10);
}

TEST_CASE("integrate layer from a C0 point: constant columns") {
    TempDir tmp;
    const auto out = tmp.file("layer.csv");
    REQUIRE(run("integrate --system layer --S 0.6 --SS 1.1 --n 4 --tmax 10 --store-dt 1 --out " + out) == 0);
    std::ifstream is(out);
    std::string line;
    bool saw_header = false;
    while (std::getline(is, line)) {
        if (line.empty() || line[0] == '#') continue;
        if (!saw_header) {
            saw_header = true;
            continue;
        }
        double t, S, I, SS, SI, II;
        REQUIRE(std::sscanf(line.c_str(), "%lf,%lf,%lf,%lf,%lf,%lf", &t, &S, &I, &SS, &SI, &II) == 6);
        CHECK(S == 0.6);
        CHECK(I == 0.0);
        CHECK(SS == 1.1);
    }
}

TEST_CASE("integrate emits an SVG when asked") {
    TempDir tmp;
    const auto out = tmp.file("t.csv");
    const auto svg = tmp.file("t.svg");
    REQUIRE(run("integrate --system slow --S 0.5 --n 4 --tmax 3 --store-dt 0.2 --out " + out +
                " --svg " + svg + " --plot-components S,SS") == 0);
    const std::string body = slurp(svg);
    CHECK(body.find("<svg xmlns") != std::string::npos);
    CHECK(body.find("<polyline") != std::string::npos);
}

TEST_CASE("singular: transversal verdict at beta=2, precondition exit at R0<=1") {
    TempDir tmp;
    REQUIRE(run("singular --beta 2 --gamma 1 --n 4 --serial --out-prefix " + tmp.file("s")) == 0);
    const std::string verdict = slurp(tmp.file("s_verdict.json"));
    CHECK(verdict.find("\"transversal\": true") != std::string::npos);
    CHECK(fs::exists(tmp.file("s_interval.csv")));
    CHECK(fs::exists(tmp.file("s_interval.svg")));

    CHECK(run("singular --beta 0.4 --gamma 1 --n 4 --out-prefix " + tmp.file("x")) == 2);
}

TEST_CASE("hopf: resolution 1 is a usage error; small slice emits all files") {
    TempDir tmp;
    CHECK(run("hopf --axes beta,n --res-x 1 --res-y 5 --out-prefix " + tmp.file("h")) == 2);
    REQUIRE(run("hopf --axes beta,n --eps 0.01 --x-lo 0.5 --x-hi 10 --y-lo 3 --y-hi 5 "
                "--res-x 12 --res-y 12 --serial --out-prefix " + tmp.file("h")) == 0);
    CHECK(fs::exists(tmp.file("h_grid.csv")));
    CHECK(fs::exists(tmp.file("h_points.json")));
    CHECK(fs::exists(tmp.file("h_boundary.svg")));
    CHECK(slurp(tmp.file("h_points.json")).find("hopf_points") != std::string::npos);
}

TEST_CASE("netsim: seeded reruns are bit-identical; odd N*n is a usage error") {
    TempDir tmp;
    const std::string flags = "netsim --N 200 --n 4 --beta 2 --gamma 1 --eps 0 --replicas 3 "
                              "--tmax 3 --sample-dt 0.1 --seed 11 --serial --out-prefix ";
    REQUIRE(run(flags + tmp.file("a")) == 0);
    REQUIRE(run(flags + tmp.file("b")) == 0);
    CHECK(slurp(tmp.file("a_ensemble.json")) == slurp(tmp.file("b_ensemble.json")));
    CHECK(slurp(tmp.file("a_compare.json")) == slurp(tmp.file("b_compare.json")));

    CHECK(run("netsim --N 201 --n 3 --out-prefix " + tmp.file("c")) == 2);
}

TEST_CASE("config file supplies options; flags override it") {
    TempDir tmp;
    const auto conf = tmp.file("run.toml");
    {
        std::ofstream os(conf);
        os << "[integrate]\n"
              "system = \"slow\"\n"
              "S = 0.5\n"
              "n = 4\n"
              "tmax = 2\n"
              "store-dt = 1\n";
    }
    const auto out = tmp.file("conf.csv");
    REQUIRE(run("--config " + conf + " integrate --tmax 4 --out " + out) == 0);
    const std::string body = slurp(out);
    CHECK(body.find("# system=slow") != std::string::npos);
    CHECK(body.find("# tmax=4.0") != std::string::npos);  // flag wins over config
    CHECK(body.find("\n4,") != std::string::npos);        // integrated to t=4
}

TEST_CASE("netsim with beta = 0: the infection never spreads") {
    TempDir tmp;
    REQUIRE(run("netsim --N 150 --n 3 --beta 0 --gamma 1 --eps 0 --replicas 2 --tmax 30 "
                "--sample-dt 1 --seed 5 --serial --replica-csv --out-prefix " + tmp.file("z")) == 0);
    std::ifstream is(tmp.file("z_replica0.csv"));
    std::string line, last;
    while (std::getline(is, line))
        if (!line.empty() && line[0] != '#' && line[0] != 't') last = line;
    double t, S, I, R;
    REQUIRE(std::sscanf(last.c_str(), "%lf,%lf,%lf,%lf", &t, &S, &I, &R) == 4);
    CHECK(I == 0.0);
}
