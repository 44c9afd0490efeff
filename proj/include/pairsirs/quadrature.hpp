#pragma once

#include <array>
#include <cmath>
#include <vector>

#include "pairsirs/errors.hpp"

namespace pairsirs {

namespace detail {
// Gauss-Kronrod 7-15 nodes/weights on [-1, 1] (positive half; symmetric).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};
// Gauss-7 weights matching Kronrod nodes 1, 3, 5, 7.
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};
} // namespace detail

/// One G7-K15 panel on [a, b]: returns the K15 value and the |K15-G7|
/// error estimate.
template <class F>
std::pair<double, double> gauss_kronrod_panel(F&& f, double a, double b) {
    const double c = 0.5 * (a + b), h = 0.5 * (b - a);
    double k15 = 0.0, g7 = 0.0;
    for (int i = 0; i < 8; ++i) {
        const double x = detail::kKronrodNodes[i] * h;
        const double fv = (i == 7) ? f(c) : f(c - x) + f(c + x);
        k15 += detail::kKronrodWeights[i] * fv;
        if (i % 2 == 1) g7 += detail::kGaussWeights[i / 2] * fv;
    }
    return {k15 * h, std::fabs((k15 - g7) * h)};
}

/// Adaptive bisection quadrature to an absolute tolerance.
template <class F>
double integrate_adaptive(F&& f, double a, double b, double abs_tol = 1e-10,
                          int max_panels = 4000) {
    struct Panel { double a, b, value, error; };
    auto make = [&](double lo, double hi) {
        auto [v, e] = gauss_kronrod_panel(f, lo, hi);
        return Panel{lo, hi, v, e};
    };
    std::vector<Panel> panels{make(a, b)};
    for (int iter = 0; iter < max_panels; ++iter) {
        double total_err = 0.0;
        std::size_t worst = 0;
        for (std::size_t i = 0; i < panels.size(); ++i) {
            total_err += panels[i].error;
            if (panels[i].error > panels[worst].error) worst = i;
        }
        if (total_err <= abs_tol) break;
        const Panel w = panels[worst];
        if (w.b - w.a < 1e-15 * std::fmax(1.0, std::fabs(w.a)))
            throw ConvergenceError("integrate_adaptive: panel underflow");
        panels[worst] = make(w.a, 0.5 * (w.a + w.b));
        panels.push_back(make(0.5 * (w.a + w.b), w.b));
    }
    double sum = 0.0;
    for (const auto& pl : panels) sum += pl.value;
    return sum;
}

} // namespace pairsirs
