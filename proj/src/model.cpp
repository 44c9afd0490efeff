#include "pairsirs/model.hpp"

#include "pairsirs/errors.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace pairsirs {

double bounded_ratio(double x, double s, double n) {
    return std::clamp(x / std::fmax(s, kRatioFloor), -n, n);
}

FullState full_rhs_raw(const FullState& y, const Params& p) {
    const double k = p.kappa();
    const double uSI = bounded_ratio(y.SI, y.S, p.n);
    const double vSS = bounded_ratio(y.SS, y.S, p.n);
    const double wSR = bounded_ratio(y.SR, y.S, p.n);
    FullState d;
    d.S  = -p.beta * y.SI + p.epsilon * (1.0 - y.S - y.I);
    d.I  = p.beta * y.SI - p.gamma * y.I;
    d.SS = 2.0 * p.epsilon * y.SR - 2.0 * k * vSS * y.SI;
    d.SI = -(p.gamma + p.beta) * y.SI + p.epsilon * y.IR + k * y.SI * (vSS - uSI);
    d.SR = p.gamma * y.SI - p.epsilon * y.SR + p.epsilon * y.RR - k * y.SI * wSR;
    d.II = 2.0 * p.beta * y.SI - 2.0 * p.gamma * y.II + 2.0 * k * y.SI * uSI;
    d.IR = p.gamma * y.II - (p.gamma + p.epsilon) * y.IR + k * y.SI * wSR;
    d.RR = 2.0 * p.gamma * y.IR - 2.0 * p.epsilon * y.RR;
    return d;
}

FullState full_rhs(const FullState& y, const Params& p) {
    p.validate();
    if (!y.finite()) throw std::domain_error("full_rhs: non-finite state");
    return full_rhs_raw(y, p);
}

ReducedState reduced_rhs_raw(const ReducedState& y, const Params& p) {
    const double k = p.kappa();
    const double uSI = bounded_ratio(y.SI, y.S, p.n);
    const double vSS = bounded_ratio(y.SS, y.S, p.n);
    ReducedState d;
    d.S  = -p.beta * y.SI + p.epsilon * (1.0 - y.S - y.I);
    d.I  = p.beta * y.SI - p.gamma * y.I;
    d.SS = 2.0 * p.epsilon * (p.n * y.S - y.SS - y.SI) - 2.0 * k * vSS * y.SI;
    d.SI = -(p.gamma + p.beta) * y.SI + p.epsilon * (p.n * y.I - y.SI - y.II)
           + k * y.SI * (vSS - uSI);
    d.II = 2.0 * p.beta * y.SI - 2.0 * p.gamma * y.II + 2.0 * k * y.SI * uSI;
    return d;
}

ReducedState reduced_rhs(const ReducedState& y, const Params& p) {
    p.validate();
    if (!y.finite()) throw std::domain_error("reduced_rhs: non-finite state");
    if (y.delta_violation(p) > kDeltaSlack)
        throw std::domain_error("reduced_rhs: state outside Delta");
    return reduced_rhs_raw(y, p);
}

ReducedState layer_rhs_raw(const ReducedState& y, const Params& p) {
    Params p0 = p;
    p0.epsilon = 0.0;
    return reduced_rhs_raw(y, p0);
}

ReducedState layer_rhs(const ReducedState& y, const Params& p) {
    Params p0 = p;
    p0.epsilon = 0.0;
    return reduced_rhs(y, p0);
}

SlowPoint slow_rhs(const SlowPoint& x, const Params& p) {
    return {1.0 - x.S, 2.0 * (p.n * x.S - x.SS)};
}

double lambda5(const SlowPoint& x, const Params& p) {
    return p.kappa() * bounded_ratio(x.SS, x.S, p.n) - (p.gamma + p.beta);
}

EigenData eigen_on_C0(const SlowPoint& x, const Params& p) {
    p.validate();
    if (!(x.S > 0.0)) throw std::domain_error("eigen_on_C0: S must be positive");
    EigenData e;
    e.lambda1 = 0.0;
    e.lambda2 = 0.0;
    e.lambda3 = -p.gamma;
    e.lambda4 = -2.0 * p.gamma;
    e.lambda5 = p.kappa() * x.SS / x.S - (p.gamma + p.beta);
    return e;
}

ReducedState endemic_equilibrium_series(const Params& p) {
    p.validate();
    if (r0(p) <= 1.0)
        throw std::domain_error("endemic_equilibrium_series: requires R0 > 1");
    const double n = p.n, b = p.beta, g = p.gamma, e = p.epsilon;
    const double D = (n * n - n - 1.0) * b - g;  // positive when R0 > 1, n > 2
    ReducedState s;
    s.S  = (n - 1.0) * (g + b) / D;
    s.SS = n * (g + b) * (g + b) / (b * D);
    const double num = n * ((n - 2.0) * b - g);
    s.I  = e * num / (g * D);
    s.SI = e * num / (b * D);
    s.II = e * num / (g * D);
    return s;
}

double r1_ngm(const Params& p) {
    p.validate();
    const double n = p.n, b = p.beta, g = p.gamma, e = p.epsilon;
    // Infected block (SI, II/2, IR) linearized at the disease-free point,
    // split A = M - V into transmission and transition parts.
    Eigen::Matrix3d M;
    M << b * (n - 1.0), 0, 0,
         0, 0, 0,
         0, 0, 0;
    Eigen::Matrix3d V;
    V << g + b, 0, -e,
         -b, 2.0 * g, 0,
         0, -2.0 * g, g + e;
    Eigen::FullPivLU<Eigen::Matrix3d> lu(V);
    if (!lu.isInvertible())
        throw ConvergenceError("r1_ngm: transition matrix V is singular");
    const Eigen::Matrix3d K = M * lu.inverse();
    const auto ev = Eigen::EigenSolver<Eigen::Matrix3d>(K, false).eigenvalues();
    double rho = 0.0;
    for (int i = 0; i < 3; ++i) rho = std::max(rho, std::abs(ev[i]));
    return rho;
}

} // namespace pairsirs
