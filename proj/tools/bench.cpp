// Benchmark comparing the serial reference loops against the OpenMP kernels
// for the two heavy data-parallel paths: sweep classification and ensemble
// replicas.

#include <chrono>
#include <cstdio>

#include "pairsirs/bifurcation.hpp"
#include "pairsirs/exec.hpp"
#include "pairsirs/netsim.hpp"

using namespace pairsirs;

namespace {

template <class F>
double time_ms(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(t1 - t0).count();
}

} // namespace

int main() {
    std::printf("openmp compiled: %s, max threads: %d\n\n",
                parallelism_compiled() ? "yes" : "no", max_threads());

    {
        Params p;
        p.gamma = 1.0;
        p.epsilon = 0.01;
        auto run = [&](ExecPolicy pol) {
            SweepOptions opt;
            opt.policy = pol;
            opt.refine_boundary = false;
            return sweep_slice(p, Axis::Beta, 0.5, 10.0, 40, Axis::N, 2.5, 6.0, 40, opt);
        };
        const double ts = time_ms([&] { run(ExecPolicy::Serial); });
        const double tp = time_ms([&] { run(ExecPolicy::Parallel); });
        std::printf("sweep_slice 40x40 (eps=0.01):  serial %8.1f ms   parallel %8.1f ms   speedup %.2fx\n",
                    ts, tp, ts / tp);
    }

    {
        Params p;
        p.beta = 2.0;
        p.epsilon = 0.0;
        EnsembleConfig cfg;
        cfg.N = 2000;
        cfg.degree = 4;
        cfg.replicas = 16;
        cfg.t_max = 8.0;
        cfg.root_seed = 7;
        auto run = [&](ExecPolicy pol) {
            cfg.policy = pol;
            return run_ensemble(p, cfg);
        };
        const double ts = time_ms([&] { run(ExecPolicy::Serial); });
        const double tp = time_ms([&] { run(ExecPolicy::Parallel); });
        std::printf("ensemble 16 x N=2000 (beta=2): serial %8.1f ms   parallel %8.1f ms   speedup %.2fx\n",
                    ts, tp, ts / tp);
    }
    return 0;
}
