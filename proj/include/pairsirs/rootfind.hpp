#pragma once

#include <cmath>
#include <functional>
#include <string>

#include "pairsirs/errors.hpp"

namespace pairsirs {

/// Bisection on [a, b]; f(a) and f(b) must have opposite (or zero) signs.
/// Stops when the bracket width drops below xtol.
template <class F>
double bisect(F&& f, double a, double b, double xtol = 1e-14, int max_iter = 200) {
    double fa = f(a), fb = f(b);
    if (fa == 0.0) return a;
    if (fb == 0.0) return b;
    if (std::signbit(fa) == std::signbit(fb))
        throw std::domain_error("bisect: endpoints do not bracket a sign change");
    for (int i = 0; i < max_iter && (b - a) > xtol; ++i) {
        const double m = 0.5 * (a + b);
        const double fm = f(m);
        if (fm == 0.0) return m;
        if (std::signbit(fm) == std::signbit(fa)) {
            a = m; fa = fm;
        } else {
            b = m; fb = fm;
        }
    }
    return 0.5 * (a + b);
}

/// A few Newton steps to polish a bisection root; falls back to the seed
/// whenever an iterate leaves [lo, hi] or the derivative degenerates.
template <class F, class DF>
double newton_polish(F&& f, DF&& df, double x0, double lo, double hi,
                     double tol = 1e-13, int max_iter = 30) {
    double x = x0;
    for (int i = 0; i < max_iter; ++i) {
        const double fx = f(x);
        const double dfx = df(x);
        if (dfx == 0.0 || !std::isfinite(dfx)) break;
        const double step = fx / dfx;
        const double xn = x - step;
        if (!(xn > lo && xn < hi)) break;
        x = xn;
        if (std::fabs(step) < tol * std::fmax(1.0, std::fabs(x))) break;
    }
    return x;
}

/// Expands b upward (geometric growth) until f changes sign against f(a);
/// returns the expanded endpoint. Used to bracket exit times.
template <class F>
double grow_upper_bracket(F&& f, double a, double b, double factor = 1.5,
                          int max_grow = 400) {
    const double fa = f(a);
    for (int i = 0; i < max_grow; ++i) {
        if (std::signbit(f(b)) != std::signbit(fa) || f(b) == 0.0) return b;
        b = a + (b - a) * factor;
    }
    throw ConvergenceError("grow_upper_bracket: no sign change found");
}

} // namespace pairsirs
