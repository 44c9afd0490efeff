#pragma once

#include <string>

#include "pairsirs/integrate.hpp"
#include "pairsirs/params.hpp"
#include "pairsirs/state.hpp"

namespace pairsirs {

/// V = ln(SS) - (2(n-1)/n) ln(S), conserved along the layer flow.
/// Requires S > 0 and SS > 0.
double constant_of_motion(double S, double SS, const Params& p);
double constant_of_motion(const SlowPoint& x, const Params& p);
double constant_of_motion(const ReducedState& y, const Params& p);

/// Power-law relation SS(t) = SS0 (S(t)/S0)^{(2n-2)/n} along the layer flow;
/// with S(t) -> S_inf it gives the landing value SS_inf.
double ss_infinity(double S0, double SS0, double S_inf, const Params& p);

/// Landing point S_inf of the fast flow started at (S0, SS0) on the repelling
/// part of C0: the unique zero in (0, S0) of
///   H(x) = n ((b+g)/b) (x^{1/n} - S0^{1/n}) - SS0 (S0^{2/n-2} x^{1-1/n} - S0^{1/n-1}),
/// bracketed by the analytic maximum S* and polished by Newton.
/// Preconditions: R1 S0 > 1 and SS0 > L S0 (at eps = 0).
double entry_root_H(double S0, double SS0, const Params& p);

/// Same landing point for a start on the parabola (SS0 = n S0^2), via
///   G(x) = ((b+g)/b)(x^{1/n} - S0^{1/n}) - S0^{2/n} x^{1-1/n} + S0^{1+1/n}.
double entry_root_G(double S0, const Params& p);

/// Closed-form slow flow from (S_inf, SS_inf), with A = S_inf - 1, B = SS_inf - n:
///   S(tau)  = A e^{-tau} + 1
///   SS(tau) = 2 A n e^{-2 tau}(e^{tau} - 1) + B e^{-2 tau} + n.
SlowPoint slow_solution(const SlowPoint& entry, double tau, const Params& p);

/// lambda5 evaluated along the closed-form slow orbit.
double lambda5_slow(const SlowPoint& entry, double tau, const Params& p);

/// Accumulated transverse eigenvalue Phi(T) = int_0^T lambda5(tau) dtau in
/// closed form. Phi(0) = 0 and Phi(T_E) = 0 defines the exit time.
double lambda5_integral(const SlowPoint& entry, double T, const Params& p);

struct EntryExitRecord {
    SlowPoint entry;
    double exit_time = 0.0;  // slow time tau
    SlowPoint exit;
    std::string method = "closed-form";  // closed-form | quadrature
    bool verified = false;               // quadrature cross-check ran
};

/// JSON rendering with full-precision decimal fields.
std::string entry_exit_json(const EntryExitRecord& rec);
void write_entry_exit_json(const std::string& path, const EntryExitRecord& rec);

enum class ExitVerify { Always, Sampled, Never };

struct ExitOptions {
    ExitVerify verify = ExitVerify::Sampled;  // sampled: 1-in-100 calls
    double time_tol = 1e-10;
    double consistency_tol = 1e-6;
};

/// Unique positive root of Phi, bracketed between the lambda5 zero-crossing
/// and a grown upper bound. Requires an attracting entry (lambda5 < 0),
/// A != 0 and R0 > 1 (so lambda5 eventually turns positive).
EntryExitRecord exit_time(const SlowPoint& entry, const Params& p,
                          const ExitOptions& opt = {});

/// Exit S for a parabola entry S_entry < 1/R1, from h(S_exit) = h(S_entry)
/// with h(x) = (1-x)^C e^x, C = ((n-2) b - g)/(b (n-1)); the exit is the
/// unique solution > 1/R1. Returns the point (S_exit, n S_exit^2).
double parabola_exit(double S_entry, const Params& p);
SlowPoint parabola_exit_point(double S_entry, const Params& p);

/// Delta-preserving infection seed for layer integration from a C0 point:
/// infect a fraction q = delta/S0 of the susceptibles, thinning edges
/// proportionally (SS (1-q)^2, SI = SS0 q (1-q), II = SS0 q^2).
ReducedState proportional_seed(const SlowPoint& x, double delta);

/// Landing point of the seeded layer flow, located by the terminal event
/// I + SI + II < tol. Verification companion to entry_root_H/G.
SlowPoint layer_landing(const SlowPoint& x, const Params& p, double delta = 1e-3,
                        double tol = 1e-9, double max_time = 2000.0);

} // namespace pairsirs
