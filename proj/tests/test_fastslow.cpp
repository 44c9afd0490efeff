#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <nlohmann/json.hpp>

#include "pairsirs/fastslow.hpp"
#include "pairsirs/model.hpp"
#include "pairsirs/quadrature.hpp"
#include "test_util.hpp"

using namespace pairsirs;
using testutil::bisect_local;

namespace {

const Params kP4{2.0, 1.0, 0.0, 4.0};

Trajectory<ReducedState> layer_traj(const SlowPoint& start, const Params& p,
                                    double t_max, double store_dt) {
    IntegrationConfig<ReducedState> cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-13;
    cfg.max_time = t_max;
    cfg.store_dt = store_dt;
    return integrate_layer(p, proportional_seed(start, 1e-3), cfg);
}

} // namespace

TEST_CASE("constant of motion: value at (1, n) and drift along the layer flow") {
    CHECK(constant_of_motion(1.0, 4.0, kP4) == doctest::Approx(std::log(4.0)).epsilon(1e-15));
    CHECK_THROWS_AS(constant_of_motion(0.0, 1.0, kP4), std::domain_error);
    CHECK_THROWS_AS(constant_of_motion(0.5, -1.0, kP4), std::domain_error);

    const auto traj = layer_traj({0.9, 4.0 * 0.81}, kP4, 50.0, 0.5);
    const double V0 = constant_of_motion(traj.states.front(), kP4);
    for (const auto& y : traj.states)
        CHECK(std::fabs(constant_of_motion(y, kP4) - V0) <= 1e-6);
}

TEST_CASE("SS(t) is reconstructed from S(t) by the conserved power law") {
    const auto traj = layer_traj({0.9, 4.0 * 0.81}, kP4, 50.0, 0.5);
    const double S0 = traj.states.front().S, SS0 = traj.states.front().SS;
    for (const auto& y : traj.states) {
        const double rebuilt = ss_infinity(S0, SS0, y.S, kP4);
        CHECK(std::fabs(rebuilt - y.SS) <= 1e-8);
    }
}

TEST_CASE("ss_infinity: identity case, direct power value, V-consistency") {
    CHECK(ss_infinity(0.7, 1.9, 0.7, kP4) == doctest::Approx(1.9).epsilon(1e-15));
    CHECK(ss_infinity(1.0, 4.0, 0.0179, kP4) ==
          doctest::Approx(4.0 * std::pow(0.0179, 1.5)).epsilon(1e-14));
    // V-preserving completion: SS_inf = exp(V0 + (2(n-1)/n) ln S_inf)
    const double V0 = constant_of_motion(0.8, 2.0, kP4);
    const double S_inf = 0.13;
    const double via_V = std::exp(V0 + 2.0 * (kP4.n - 1.0) / kP4.n * std::log(S_inf));
    CHECK(std::fabs(ss_infinity(0.8, 2.0, S_inf, kP4) - via_V) <= 1e-12);
}

TEST_CASE("entry_root_H: closed-form factorization at (S0, SS0) = (1, n)") {
    // at n=4, beta=2, gamma=1 the root equation factors to 2u^3 - 3u + 1 = 0
    // in u = x^{1/4}, whose relevant root is u = (sqrt(3) - 1)/2
    const double expected = std::pow((std::sqrt(3.0) - 1.0) / 2.0, 4.0);
    CHECK(std::fabs(entry_root_H(1.0, 4.0, kP4) - expected) <= 1e-10);
}

TEST_CASE("entry_root_H preconditions") {
    const double L = geometry(kP4).L();
    CHECK_THROWS_AS(entry_root_H(0.8, L * 0.8 * 0.95, kP4), std::domain_error);
    CHECK_THROWS_AS(entry_root_H(0.3, 1.1, kP4), std::domain_error);  // R1 S0 < 1
}

TEST_CASE("entry_root_H agrees with seeded layer integration (n=3 regime)") {
    const Params p{1.5, 1.0, 0.0, 3.0};
    const double S0 = 0.95, SS0 = 3.0 * S0 * S0;
    const double root = entry_root_H(S0, SS0, p);
    const SlowPoint land = layer_landing({S0, SS0}, p);
    CHECK(std::fabs(root - land.S) <= 1e-2);
}

TEST_CASE("entry_root_G: frozen oracle value and equivalence with H") {
    CHECK(entry_root_G(0.9, kP4) == doctest::Approx(0.0394030737).epsilon(1e-7));
    for (double S0 : {0.55, 0.6, 0.7, 0.8, 0.9, 1.0}) {
        CHECK(std::fabs(entry_root_G(S0, kP4) -
                        entry_root_H(S0, kP4.n * S0 * S0, kP4)) <= 1e-12);
    }
    CHECK(std::fabs(entry_root_G(1.0, kP4) - entry_root_H(1.0, kP4.n, kP4)) <= 1e-14);
}

TEST_CASE("slow_solution: spot value, long-time limit, parabola attraction rate") {
    const SlowPoint at = slow_solution({0.5, 1.0}, std::log(2.0), kP4);
    CHECK(at.S == doctest::Approx(0.75).epsilon(1e-15));
    CHECK(at.SS == doctest::Approx(2.25).epsilon(1e-14));

    const SlowPoint far = slow_solution({0.5, 1.0}, 40.0, kP4);
    CHECK(far.S == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(far.SS == doctest::Approx(kP4.n).epsilon(1e-15));

    Rng rng(41);
    for (int k = 0; k < 50; ++k) {
        const SlowPoint e{testutil::uniform(rng, 0.02, 0.6),
                          testutil::uniform(rng, 0.0, 2.0)};
        const double d0 = std::fabs(e.SS - kP4.n * e.S * e.S);
        for (double tau : {0.3, 1.0, 2.5}) {
            const SlowPoint x = slow_solution(e, tau, kP4);
            const double d = std::fabs(x.SS - kP4.n * x.S * x.S);
            CHECK(d == doctest::Approx(std::exp(-2.0 * tau) * d0).epsilon(1e-12));
        }
    }
}

TEST_CASE("slow flow: a start on the parabola stays on it to 1e-12") {
    for (double S : {0.1, 0.25, 0.4}) {
        const SlowPoint e{S, kP4.n * S * S};
        for (double tau : {0.5, 1.5, 3.0}) {
            const SlowPoint x = slow_solution(e, tau, kP4);
            CHECK(std::fabs(x.SS - kP4.n * x.S * x.S) <= 1e-12);
        }
    }
}

TEST_CASE("exit_time at the origin reduces to 2s = -ln(1-s)") {
    const double s_star =
        bisect_local([](double s) { return 2.0 * s + std::log(1.0 - s); }, 0.5, 0.999999999);
    CHECK(s_star == doctest::Approx(0.7968).epsilon(1e-4));
    ExitOptions opt;
    opt.verify = ExitVerify::Always;
    const EntryExitRecord rec = exit_time({0.0, 0.0}, kP4, opt);
    CHECK(std::fabs(rec.exit_time - (-std::log(1.0 - s_star))) <= 1e-8);
    CHECK(std::fabs(rec.exit.S - s_star) <= 1e-8);
    CHECK(rec.verified);
    CHECK(rec.method == "closed-form");
}

TEST_CASE("exit_time: closed form agrees with an independent quadrature root") {
    ExitOptions opt;
    opt.verify = ExitVerify::Always;
    for (const SlowPoint entry : {SlowPoint{0.2, 4.0 * 0.04}, SlowPoint{0.2, 0.3},
                                  SlowPoint{0.35, 0.2}, SlowPoint{0.1, 0.15}}) {
        const EntryExitRecord rec = exit_time(entry, kP4, opt);
        // defining relation: the accumulated eigenvalue integral vanishes
        auto lam = [&](double tau) { return lambda5_slow(entry, tau, kP4); };
        CHECK(std::fabs(integrate_adaptive(lam, 0.0, rec.exit_time, 1e-12)) <= 1e-8);
        // test-local quadrature-based exit time
        const double tau0 = bisect_local(lam, 1e-9, 60.0);
        const double T_quad = bisect_local(
            [&](double T) { return integrate_adaptive(lam, 0.0, T, 1e-12); }, tau0,
            rec.exit_time * 4.0 + 1.0);
        CHECK(std::fabs(rec.exit_time - T_quad) <= 1e-8);
        // sign pattern at entry and past the lambda5 zero
        CHECK(lam(0.0) < 0.0);
        CHECK(lam(tau0 + 1e-3) > 0.0);
        CHECK(lambda5_slow(entry, rec.exit_time, kP4) > 0.0);
    }
}

TEST_CASE("exit_time rejects degenerate and repelling entries") {
    CHECK_THROWS_AS(exit_time({1.0, 4.0}, kP4), std::domain_error);   // A = 0
    CHECK_THROWS_AS(exit_time({0.8, 3.0}, kP4), std::domain_error);   // lambda5 > 0
    CHECK_THROWS_AS(exit_time({0.2, 0.16}, {0.4, 1.0, 0.0, 4.0}),
                    std::domain_error);  // R0 < 1: lambda5 never turns positive
}

TEST_CASE("parabola_exit: frozen values, monotonicity, round trip") {
    const double s_star =
        bisect_local([](double s) { return 2.0 * s + std::log(1.0 - s); }, 0.5, 0.999999999);
    CHECK(std::fabs(parabola_exit(0.0, kP4) - s_star) <= 1e-10);
    CHECK(parabola_exit(0.1, kP4) == doctest::Approx(0.759186970).epsilon(1e-8));
    CHECK(parabola_exit(0.2, kP4) == doctest::Approx(0.713585054).epsilon(1e-8));

    const double C = ((kP4.n - 2.0) * kP4.beta - kP4.gamma) / (kP4.beta * (kP4.n - 1.0));
    auto h = [&](double x) { return std::pow(1.0 - x, C) * std::exp(x); };
    double prev = 2.0;
    for (int i = 0; i < 100; ++i) {
        const double entry = 0.4999 * i / 99.0;
        const double exit = parabola_exit(entry, kP4);
        CHECK(exit < prev);  // strictly decreasing exits (h-map monotonicity)
        prev = exit;
        CHECK(h(exit) == doctest::Approx(h(entry)).epsilon(1e-12));
        const SlowPoint pt = parabola_exit_point(entry, kP4);
        CHECK(pt.SS == doctest::Approx(kP4.n * exit * exit).epsilon(1e-14));
    }
    CHECK_THROWS_AS(parabola_exit(0.5, kP4), std::domain_error);   // at 1/R1
    CHECK_THROWS_AS(parabola_exit(0.2, {0.4, 1.0, 0.0, 4.0}), std::domain_error);  // C <= 0
}

TEST_CASE("layer flow: S, SS non-increasing and the infected block dies out") {
    Rng rng(77);
    for (int k = 0; k < 20; ++k) {
        Params p{0.0, 1.0, 0.0, 4.0};
        const double R0 = testutil::uniform(rng, 1.5, 5.0);
        p.beta = R0 * p.gamma / (p.n - 2.0);
        const double S0 = testutil::uniform(rng, 0.8, 1.0);
        const auto traj = layer_traj({S0, p.n * S0 * S0}, p, 200.0, 2.0);
        for (std::size_t i = 1; i < traj.states.size(); ++i) {
            CHECK(traj.states[i].S <= traj.states[i - 1].S + 1e-12);
            CHECK(traj.states[i].SS <= traj.states[i - 1].SS + 1e-12);
        }
        const ReducedState& tail = traj.back();
        CHECK(tail.I <= 1e-8);
        CHECK(tail.SI <= 1e-8);
        CHECK(tail.II <= 1e-8);
    }
}

TEST_CASE("fast-map image lands strictly below the L-line") {
    Rng rng(55);
    const double L = geometry(kP4).L();
    for (int k = 0; k < 100; ++k) {
        const double S0 = testutil::uniform(rng, 0.55, 1.0);
        const double SS0 = testutil::uniform(rng, L * S0 * 1.01, kP4.n * S0);
        const double S_inf = entry_root_H(S0, SS0, kP4);
        const double SS_inf = ss_infinity(S0, SS0, S_inf, kP4);
        CHECK(SS_inf < L * S_inf);
    }
}

TEST_CASE("the region below alpha is forward invariant for the slow flow") {
    Rng rng(91);
    const Geometry geo = geometry(kP4);
    for (int k = 0; k < 100; ++k) {
        const double S = testutil::uniform(rng, 0.05, 0.9);
        const double SS = testutil::uniform(rng, 0.0, geo.alpha(S));
        const SlowPoint e{S, SS};
        for (double tau = 0.1; tau <= 6.0; tau += 0.1) {
            const SlowPoint x = slow_solution(e, tau, kP4);
            CHECK(x.SS <= geo.alpha(x.S) + 1e-9);
        }
    }
}

TEST_CASE("entry-exit record JSON round-trips bit-exactly") {
    ExitOptions opt;
    opt.verify = ExitVerify::Never;
    const EntryExitRecord rec = exit_time({0.2, 0.16}, kP4, opt);
    const auto j = nlohmann::json::parse(entry_exit_json(rec));
    CHECK(j["exit_time"].get<double>() == rec.exit_time);
    CHECK(j["exit"]["S"].get<double>() == rec.exit.S);
    CHECK(j["entry"]["SS"].get<double>() == rec.entry.SS);
    CHECK(j["method"] == "closed-form");
}

TEST_CASE("proportional seed sits exactly in Delta, boundary case included") {
    const ReducedState y = proportional_seed({1.0, 4.0}, 1e-3);
    Params p = kP4;
    CHECK(y.delta_violation(p) <= 1e-15);
    CHECK(y.S + y.I == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(y.SS + y.SI == doctest::Approx(p.n * y.S).epsilon(1e-12));
    CHECK(y.SI + y.II == doctest::Approx(p.n * y.I).epsilon(1e-12));
}
