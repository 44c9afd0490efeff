#pragma once

#include "pairsirs/params.hpp"
#include "pairsirs/state.hpp"

namespace pairsirs {

// Below this S the ratio terms SI/S, SS/S, SR/S switch to the clamped
// Lipschitz extension (both ratios are bounded by n inside Delta).
inline constexpr double kRatioFloor = 1e-12;

// Delta-membership slack accepted by the checked right-hand sides; adaptive
// integration may overshoot the boundary by integration-error amounts.
inline constexpr double kDeltaSlack = 1e-6;

/// x/s clamped to [-n, n] with the denominator floored at kRatioFloor: the
/// Lipschitz extension of the closure ratios. Inside Delta the clamp never
/// binds (the ratios lie in [0, n] there); the lower bound is -n rather than 0
/// so the clamp stays inactive in a neighborhood of C0, keeping
/// finite-difference Jacobians two-sided.
double bounded_ratio(double x, double s, double n);

/// Time derivative of the 8-component system. Unchecked variant assumes a
/// finite state; the checked one rejects non-finite input.
FullState full_rhs_raw(const FullState& y, const Params& p);
FullState full_rhs(const FullState& y, const Params& p);

/// Time derivative of the reduced 5-component system. The checked variant
/// rejects states outside Delta by more than kDeltaSlack.
ReducedState reduced_rhs_raw(const ReducedState& y, const Params& p);
ReducedState reduced_rhs(const ReducedState& y, const Params& p);

/// Fast subsystem: the reduced right-hand side with the eps-terms removed.
ReducedState layer_rhs_raw(const ReducedState& y, const Params& p);
ReducedState layer_rhs(const ReducedState& y, const Params& p);

/// Slow flow on C0 in slow time tau: dS = 1-S, dSS = 2(nS - SS).
SlowPoint slow_rhs(const SlowPoint& x, const Params& p);

/// Geometric curves on C0.
struct Geometry {
    Params p;
    /// Slope L of the loss-of-hyperbolicity line SS = L S; equals n/R1 at eps=0.
    double L() const { return p.n * (p.beta + p.gamma) / (p.beta * (p.n - 1.0)); }
    double L_line(double S) const { return L() * S; }
    /// Invariant attracting parabola of the slow flow.
    double parabola(double S) const { return p.n * S * S; }
    /// lambda5 increases along the slow flow iff SS < alpha(S) = 2nS^2/(S+1).
    double alpha(double S) const { return 2.0 * p.n * S * S / (S + 1.0); }
};

inline Geometry geometry(const Params& p) {
    p.validate();
    return Geometry{p};
}

/// Transverse eigenvalue of the layer linearization at (S, 0, SS, 0, 0).
double lambda5(const SlowPoint& x, const Params& p);

/// All five eigenvalue real parts on C0; requires S > 0.
EigenData eigen_on_C0(const SlowPoint& x, const Params& p);

/// Endemic equilibrium truncated at first order in eps
/// (zeroth order for S, SS). Requires R0 > 1.
ReducedState endemic_equilibrium_series(const Params& p);

/// R1 via the next-generation construction: transmission matrix M and
/// transition matrix V for the infected block (SI, II/2, IR); returns the
/// spectral radius of M V^{-1}. Independent route against r1_closed.
double r1_ngm(const Params& p);

} // namespace pairsirs
