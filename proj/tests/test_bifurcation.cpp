#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "pairsirs/bifurcation.hpp"
#include "pairsirs/model.hpp"
#include "pairsirs/singular_orbit.hpp"
#include "test_util.hpp"

using namespace pairsirs;

TEST_CASE("refine_equilibrium: residual, series proximity, O(eps^2) seed distance") {
    Params p{2.0, 1.0, 0.01, 4.0};
    const ReducedState eq = refine_equilibrium(p);
    CHECK(std::fabs(eq.S - 3.0 / 7.0) <= 10.0 * p.epsilon);
    const ReducedState r = reduced_rhs(eq, p);
    for (std::size_t i = 0; i < 5; ++i) CHECK(std::fabs(r[i]) <= 1e-12);

    auto seed_gap_I = [](double eps) {
        Params q{2.0, 1.0, eps, 4.0};
        return std::fabs(refine_equilibrium(q).I - endemic_equilibrium_series(q).I);
    };
    const double g1 = seed_gap_I(0.01), g2 = seed_gap_I(0.005);
    CHECK(g1 <= 20.0 * 0.01 * 0.01);
    CHECK(g2 <= g1 / 2.0);  // quadratic shrinkage of the series error

    // eps -> 0: the refined point approaches the series at first order
    Params tiny{2.0, 1.0, 1e-8, 4.0};
    CHECK(std::fabs(refine_equilibrium(tiny).S - 3.0 / 7.0) <= 1e-6);
}

TEST_CASE("refine_equilibrium requires an endemic branch") {
    CHECK_THROWS_AS(refine_equilibrium({0.4, 1.0, 0.01, 4.0}), std::domain_error);
}

TEST_CASE("jacobian_spectrum: C0 oracle, unstable disease-free point, diagonal field") {
    Params p{2.0, 1.0, 0.0, 4.0};
    const Spectrum5 sp = jacobian_spectrum({0.6, 0.0, 1.1, 0.0, 0.0}, p);
    const EigenData an = eigen_on_C0({0.6, 1.1}, p);
    std::array<double, 5> expect{0.0, 0.0, an.lambda3, an.lambda4, an.lambda5};
    std::sort(expect.begin(), expect.end(), std::greater<>());
    for (int i = 0; i < 5; ++i) CHECK(std::fabs(sp[i].real() - expect[i]) <= 1e-6);

    Params pe{2.0, 1.0, 0.001, 4.0};
    const Spectrum5 dfe = jacobian_spectrum({1.0, 0.0, 4.0, 0.0, 0.0}, pe);
    CHECK(dfe[0].real() > 0.0);

    // the FD-Jacobian/eigenvalue machinery on a diagonal linear field
    auto diag_field = [](const std::vector<double>& x) {
        return std::vector<double>{1.0 * x[0], -2.0 * x[1], 3.0 * x[2], -4.0 * x[3], 5.0 * x[4]};
    };
    const auto J = fd_jacobian(diag_field, {0.3, -1.0, 2.0, 0.5, -0.2});
    const auto ev = dense_eigenvalues(J, 5);
    const double want[5] = {5.0, 3.0, 1.0, -2.0, -4.0};
    for (int i = 0; i < 5; ++i) {
        CHECK(std::fabs(ev[i].real() - want[i]) <= 1e-9);
        CHECK(std::fabs(ev[i].imag()) <= 1e-12);
    }
}

TEST_CASE("hopf_bisect: crossing inside (2, 12) at n=4, eps=0.01") {
    Params base{1.0, 1.0, 0.01, 4.0};
    const auto hp = hopf_bisect(base, Axis::Beta, 2.0, 12.0);
    REQUIRE(hp.has_value());
    CHECK(hp->beta == doctest::Approx(8.0909).epsilon(2e-3));
    CHECK(std::fabs(hp->critical_pair.real()) <= 1e-6);
    CHECK(hp->frequency > 0.0);
    // remaining eigenvalues strictly stable at the crossing
    Params at = base;
    at.beta = hp->beta;
    const Spectrum5 sp = jacobian_spectrum(refine_equilibrium(at), at);
    for (const auto& z : sp) {
        if (std::fabs(z.imag() - hp->frequency) < 1e-6) continue;
        if (std::fabs(z.imag() + hp->frequency) < 1e-6) continue;
        CHECK(z.real() < 0.0);
    }
}

TEST_CASE("hopf_bisect: no sign change yields nothing") {
    Params base{1.0, 1.0, 0.01, 6.0};
    CHECK_FALSE(hopf_bisect(base, Axis::Beta, 1.0, 10.0).has_value());  // n=6: stable
    Params cyc{1.0, 1.0, 0.01, 4.0};
    CHECK_FALSE(hopf_bisect(cyc, Axis::Beta, 3.0, 5.0).has_value());  // both cycle side
}

TEST_CASE("sweep_slice: eps=0.01 slice has a boundary confined to n < 6") {
    Params base{1.0, 1.0, 0.01, 4.0};
    SweepOptions opt;
    opt.policy = ExecPolicy::Serial;
    const SweepGrid g = sweep_slice(base, Axis::Beta, 0.2, 12.0, 30, Axis::N, 2.5, 6.0, 30, opt);
    CHECK(g.boundary.size() > 0);
    for (const auto& hp : g.boundary) CHECK(hp.n < 6.0);
    // the n = 6 row is entirely stable
    for (std::size_t i = 0; i < g.xs.size(); ++i)
        CHECK(g.at(i, g.ys.size() - 1).cls == StabilityClass::StableEquilibrium);
    CHECK(g.failures == 0);
}

TEST_CASE("sweep_slice: eps=0.25 slice is empty of cycles") {
    Params base{1.0, 1.0, 0.25, 4.0};
    SweepOptions opt;
    opt.policy = ExecPolicy::Serial;
    const SweepGrid g = sweep_slice(base, Axis::Beta, 0.2, 15.0, 25, Axis::N, 2.1, 6.0, 25, opt);
    CHECK(g.boundary.empty());
    for (const auto& c : g.cells) CHECK(c.cls != StabilityClass::CycleSide);
}

TEST_CASE("sweep_slice: degenerate resolutions are rejected; uniform grids have no boundary") {
    Params base{1.0, 1.0, 0.01, 4.0};
    CHECK_THROWS_AS(sweep_slice(base, Axis::Beta, 1.0, 2.0, 1, Axis::N, 3.0, 4.0, 5, {}),
                    std::domain_error);
    SweepOptions opt;
    opt.policy = ExecPolicy::Serial;
    const SweepGrid g = sweep_slice(base, Axis::Beta, 0.05, 0.1, 2, Axis::N, 5.5, 6.0, 2, opt);
    CHECK(g.boundary.empty());
}

TEST_CASE("spectrum continuity along a sweep row") {
    Params base{1.0, 1.0, 0.01, 4.0};
    SweepOptions opt;
    opt.policy = ExecPolicy::Serial;
    opt.refine_boundary = false;
    const SweepGrid g = sweep_slice(base, Axis::Beta, 1.0, 12.0, 45, Axis::N, 3.0, 4.0, 2, opt);
    const double step = g.xs[1] - g.xs[0];
    for (std::size_t j = 0; j < g.ys.size(); ++j) {
        for (std::size_t i = 0; i + 1 < g.xs.size(); ++i) {
            const auto& a = g.at(i, j);
            const auto& b = g.at(i + 1, j);
            if (!a.has_pair || !b.has_pair) continue;
            CHECK(std::abs(a.leading - b.leading) < 10.0 * step);
        }
    }
}

TEST_CASE("largest_hopf_eps: apex near 0.03 at n=4, none at n=6") {
    Params base{1.0, 1.0, 0.01, 4.0};
    std::vector<double> betas;
    for (double b = 0.6; b <= 12.0; b += 0.2) betas.push_back(b);
    const double e4 = largest_hopf_eps(base, 4.0, betas, 1e-3, 1.0, 1e-3, ExecPolicy::Serial);
    CHECK(e4 == doctest::Approx(0.030).epsilon(0.15));
    const double e6 = largest_hopf_eps(base, 6.0, betas, 1e-3, 1.0, 1e-3, ExecPolicy::Serial);
    CHECK(e6 == 0.0);
}

TEST_CASE("Hopf cross-validation: long runs classify both sides of five Hopf points") {
    // (n, eps, bisect range, inside beta, outside beta, outside t_max)
    struct Probe {
        double n, eps, blo, bhi, beta_in, beta_out, t_out;
    };
    const Probe probes[] = {
        {4, 0.006, 2.0, 14.0, 3.0, 13.0, 12000.0},
        {4, 0.010, 2.0, 14.0, 2.0, 12.0, 6000.0},
        {4, 0.014, 2.0, 14.0, 2.5, 10.5, 6000.0},
        {3, 0.020, 8.0, 60.0, 4.5, 33.0, 12000.0},
        {3, 0.025, 8.0, 60.0, 4.5, 33.0, 12000.0},
    };
    const ReducedState y0{0.6, 0.06, 1.2, 0.15, 0.02};
    for (const auto& pr : probes) {
        CAPTURE(pr.n);
        CAPTURE(pr.eps);
        Params base{1.0, 1.0, pr.eps, pr.n};
        const auto hp = hopf_bisect(base, Axis::Beta, pr.blo, pr.bhi);
        REQUIRE(hp.has_value());
        CHECK(pr.beta_in < hp->beta);
        CHECK(pr.beta_out > hp->beta);

        IntegrationConfig<ReducedState> cfg;
        cfg.store_dt = 0.25;
        Params in = base;
        in.beta = pr.beta_in;
        cfg.max_time = 3000.0;
        CHECK(detect_attractor(integrate_full_stiff(in, y0, cfg), in).kind ==
              AttractorKind::LimitCycle);

        Params outp = base;
        outp.beta = pr.beta_out;
        cfg.max_time = pr.t_out;
        CHECK(detect_attractor(integrate_full_stiff(outp, y0, cfg), outp).kind ==
              AttractorKind::Equilibrium);
    }
}

TEST_CASE("interval-test transversality agrees with the small-eps Hopf side") {
    // cycle-side points at eps = 0.005: the singular (eps = 0) interval test
    // must report a transversal crossing at the same (n, beta)
    for (double beta : {1.5, 2.0, 5.0}) {
        Params pe{beta, 1.0, 0.005, 4.0};
        CHECK(classify_equilibrium(pe).cls == StabilityClass::CycleSide);

        Params p0{beta, 1.0, 0.0, 4.0};
        const CycleCandidate c = find_candidate_cycle(p0, 0.9);
        REQUIRE(c.converged);
        IntervalTestOptions opt;
        opt.policy = ExecPolicy::Serial;
        CHECK(interval_test(p0, {c.S0, c.SS0}, opt).transversal());
    }
}
