#pragma once

#include <optional>
#include <string>
#include <vector>

#include "pairsirs/exec.hpp"
#include "pairsirs/fastslow.hpp"
#include "pairsirs/integrate.hpp"
#include "pairsirs/io.hpp"
#include "pairsirs/params.hpp"
#include "pairsirs/state.hpp"

namespace pairsirs {

/// Fast map Pi1: repelling C0 point to its landing point
/// (entry_root_H, ss_infinity).
SlowPoint pi1_fast(const SlowPoint& point, const Params& p);

/// Pi1 with a direct layer-integration cross-check: the root-based landing
/// must match the delta-seeded integration within `tol`.
SlowPoint pi1_fast_verified(const SlowPoint& point, const Params& p,
                            double delta = 1e-3, double tol = 1e-2);

/// Slow map Pi2: attracting entry point to the exit point at its exit time.
SlowPoint pi2_slow(const SlowPoint& entry, const Params& p,
                   const ExitOptions& opt = {});

struct CycleCandidate {
    double S0 = 0.0, SS0 = 0.0;
    bool converged = false;
    int iterations = 0;
    std::string note;            // divergence reason when not converged
    std::vector<double> iterates;  // S0 history, including the start
};

struct CycleOptions {
    ExitOptions exit;
    // Treat entries as lying on Gamma and map them by the h-map instead of the
    // general exit-time path. Exact only as n grows; opt-in.
    bool parabola_shortcut = false;
};

/// Iterates Pi2 o Pi1 from (S0_init, n S0_init^2) until successive S0 values
/// differ by < 1e-8 or 200 iterations. Iterates that leave the admissible
/// region produce a divergence report instead of an exception.
CycleCandidate find_candidate_cycle(const Params& p, double S0_init,
                                    const CycleOptions& opt = {});

enum class Transversality { Transversal, NoCrossing, Undecided };

struct IntervalImage {
    double S0 = 0.0;                // section location
    std::vector<double> J1;         // SS values sampled on the section
    std::vector<SlowPoint> J2;      // images under the fast map
    std::vector<SlowPoint> J3;      // images under the slow map
    std::vector<std::string> errors;  // per-sample error tag, empty = ok
    Transversality verdict = Transversality::Undecided;
    double crossing_slope = 0.0;    // secant slope of (SS_J3 - SS_J1) at the crossing

    bool transversal() const { return verdict == Transversality::Transversal; }
};

struct IntervalTestOptions {
    double width = 1e-2;  // J1 width in SS
    int samples = 21;
    ExecPolicy policy = ExecPolicy::Parallel;
    ExitOptions exit;
    bool parabola_shortcut = false;
};

/// Samples J1 at the candidate section, maps each point by Pi1 then Pi2, and
/// reports whether the offsets SS_J3 - SS_J1 change sign with a nonzero
/// secant slope (the computable stand-in for "J3 crosses J1 transversally").
IntervalImage interval_test(const Params& p, const SlowPoint& candidate,
                            const IntervalTestOptions& opt = {});

void write_interval_csv(const std::string& path, const IntervalImage& im,
                        const Metadata& meta);
void write_interval_svg(const std::string& path, const IntervalImage& im,
                        const Params& p);

enum class AttractorKind { Equilibrium, LimitCycle, Undecided };

struct AttractorReport {
    AttractorKind kind = AttractorKind::Undecided;
    double period = 0.0;       // time units, when periodic
    double amplitude = 0.0;    // max - min of I over the tail
    double deviation = 0.0;    // max distance from the equilibrium over the tail
    Params params;
    std::string note;
};

inline const char* attractor_name(AttractorKind k) {
    switch (k) {
        case AttractorKind::Equilibrium: return "equilibrium";
        case AttractorKind::LimitCycle: return "limit-cycle";
        default: return "undecided";
    }
}

struct AttractorOptions {
    double tail_fraction = 0.2;       // last 20% of the run
    double equilibrium_dev = 1e-6;
    double period_spread = 0.01;      // relative spread of successive peak gaps
    double amplitude_factor = 5.0;    // required I-amplitude in units of eps
    std::size_t min_peaks = 3;
};

/// Classifies the tail of a full-system trajectory as converged-to-equilibrium
/// or periodic. The trajectory should be densely sampled (store_dt) so the
/// fast spikes are resolved.
AttractorReport detect_attractor(const Trajectory<ReducedState>& traj, const Params& p,
                                 const AttractorOptions& opt = {});

} // namespace pairsirs
