#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <sstream>
#include <string>
#include <vector>

#include "pairsirs/errors.hpp"
#include "pairsirs/params.hpp"
#include "pairsirs/state.hpp"

namespace pairsirs {

enum class Regime { Fast, Slow, Full };

inline const char* regime_name(Regime r) {
    switch (r) {
        case Regime::Fast: return "fast";
        case Regime::Slow: return "slow";
        default: return "full";
    }
}

/// Threshold event g(t, y) with a required crossing direction:
/// -1 falling (g>0 to g<=0), +1 rising, 0 either.
template <class State>
struct Event {
    std::function<double(double, const State&)> value;
    int direction = 0;
    bool terminal = true;
    std::string name = "event";
};

template <class State>
struct IntegrationConfig {
    double rel_tol = 1e-9;
    double abs_tol = 1e-11;
    double max_step = std::numeric_limits<double>::infinity();
    double max_time = 100.0;
    double initial_step = 0.0;  // 0: choose automatically
    double store_dt = 0.0;      // 0: store every accepted step; >0: dense grid
    // Non-negativity projection: accepted-step components in (-floor, 0) are
    // flushed to 0. Population components decaying to exact zero otherwise sit
    // in roundoff noise of either sign, and a negative seed erupts unphysically
    // along the repelling transverse direction. 0 disables.
    double nonneg_floor = 0.0;
    std::vector<Event<State>> events;

    void validate() const {
        if (!(rel_tol > 0.0) || !(abs_tol > 0.0))
            throw std::domain_error("IntegrationConfig: tolerances must be positive");
        if (!(max_time > 0.0))
            throw std::domain_error("IntegrationConfig: max_time must be positive");
    }
};

struct EventRecord {
    double time = 0.0;
    std::size_t event_id = 0;
    std::string name;
};

template <class State>
struct Trajectory {
    std::vector<double> times;
    std::vector<State> states;
    Regime regime = Regime::Full;
    std::vector<EventRecord> events;
    bool reached_max_time = false;

    const State& back() const { return states.back(); }
    double end_time() const { return times.back(); }
};

namespace dopri5 {

// Dormand-Prince 5(4) tableau.
inline constexpr double a21 = 1.0 / 5;
inline constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
inline constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
inline constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                        a53 = 64448.0 / 6561, a54 = -212.0 / 729;
inline constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33,
                        a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                        a65 = -5103.0 / 18656;
inline constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                        b5 = -2187.0 / 6784, b6 = 11.0 / 84;
inline constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
inline constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                        e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients.
inline constexpr double d1 = -12715105075.0 / 11282082432.0;
inline constexpr double d3 = 87487479700.0 / 32700410799.0;
inline constexpr double d4 = -10690763975.0 / 1880347072.0;
inline constexpr double d5 = 701980252875.0 / 199316789632.0;
inline constexpr double d6 = -1453857185.0 / 822651844.0;
inline constexpr double d7 = 69997945.0 / 29380423.0;

} // namespace dopri5

/// One accepted step's quartic interpolant.
template <class State>
struct DenseSegment {
    double t0 = 0.0, h = 0.0;
    State r1, r2, r3, r4, r5;

    State eval(double t) const {
        const double th = (t - t0) / h;
        const double th1 = 1.0 - th;
        State y;
        for (std::size_t i = 0; i < State::size(); ++i)
            y[i] = r1[i] + th * (r2[i] + th1 * (r3[i] + th * (r4[i] + th1 * r5[i])));
        return y;
    }
};

/// Explicit adaptive Dormand-Prince 5(4) with PI step control, dense output
/// and bisection event location (1e-10 in time).
template <class State, class Rhs>
Trajectory<State> integrate(Rhs&& rhs, const State& y0,
                            const IntegrationConfig<State>& cfg,
                            Regime regime = Regime::Full) {
    using namespace dopri5;
    cfg.validate();
    if (!y0.finite()) throw std::domain_error("integrate: non-finite initial state");

    constexpr std::size_t N = State::size();
    const double t_end = cfg.max_time;
    const double safe = 0.9, beta_pi = 0.04, expo1 = 0.2 - beta_pi * 0.75;
    const double fac_lo = 0.2, fac_hi = 10.0;

    Trajectory<State> out;
    out.regime = regime;
    out.times.push_back(0.0);
    out.states.push_back(y0);

    State y = y0;
    double t = 0.0;
    State k1 = rhs(t, y);

    auto err_norm = [&](const State& ya, const State& yb, const State& e) {
        double sum = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double sc = cfg.abs_tol + cfg.rel_tol * std::fmax(std::fabs(ya[i]), std::fabs(yb[i]));
            const double q = e[i] / sc;
            sum += q * q;
        }
        return std::sqrt(sum / static_cast<double>(N));
    };

    // Initial step: small fraction of the scale suggested by |y|/|y'|.
    double h = cfg.initial_step;
    if (h <= 0.0) {
        double d0 = 0.0, d1n = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            d0 = std::fmax(d0, std::fabs(y[i]));
            d1n = std::fmax(d1n, std::fabs(k1[i]));
        }
        h = (d1n > 0.0) ? 0.01 * std::fmax(1e-6, d0 + 1.0) / d1n : 1e-3;
        h = std::fmin(h, t_end);
    }
    h = std::fmin(h, cfg.max_step);

    auto project = [&](State& s) {
        if (cfg.nonneg_floor <= 0.0) return;
        for (std::size_t i = 0; i < N; ++i)
            if (s[i] < 0.0 && s[i] > -cfg.nonneg_floor) s[i] = 0.0;
    };

    std::vector<double> g_prev(cfg.events.size());
    for (std::size_t e = 0; e < cfg.events.size(); ++e)
        g_prev[e] = cfg.events[e].value(t, y);

    double next_store = cfg.store_dt;
    double facold = 1e-4;
    bool done = false;

    while (!done) {
        if (t + h >= t_end) {
            h = t_end - t;
            done = true;
        }
        if (h < 1e-14 * std::fmax(1.0, std::fabs(t))) {
            std::ostringstream os;
            os << "integrate: step size underflow at t=" << t << ", state=(";
            for (std::size_t i = 0; i < N; ++i) os << (i ? "," : "") << y[i];
            os << ")";
            throw StiffnessError(os.str());
        }

        State k2, k3, k4, k5, k6, k7, yt, ynew, errv;
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * a21 * k1[i];
        k2 = rhs(t + c2 * h, yt);
        for (std::size_t i = 0; i < N; ++i) yt[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(t + c3 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(t + c4 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(t + c5 * h, yt);
        for (std::size_t i = 0; i < N; ++i)
            yt[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
        k6 = rhs(t + h, yt);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + h * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(t + h, ynew);
        for (std::size_t i = 0; i < N; ++i)
            errv[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
        project(ynew);

        bool finite = ynew.finite();
        const double err = finite ? err_norm(y, ynew, errv) : 2.0;

        if (err > 1.0) {
            // reject
            const double fac11 = std::pow(std::fmax(err, 1e-10), expo1);
            h /= std::fmin(1.0 / fac_lo, fac11 / safe);
            done = false;
            continue;
        }

        // accept: build the dense segment before advancing
        DenseSegment<State> seg;
        seg.t0 = t;
        seg.h = h;
        for (std::size_t i = 0; i < N; ++i) {
            const double dy = ynew[i] - y[i];
            const double bspl = h * k1[i] - dy;
            seg.r1[i] = y[i];
            seg.r2[i] = dy;
            seg.r3[i] = bspl;
            seg.r4[i] = dy - h * k7[i] - bspl;
            seg.r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] +
                             d6 * k6[i] + d7 * k7[i]);
        }
        const double t_new = t + h;

        // event check on [t, t_new]
        double t_stop = t_new;
        State y_stop = ynew;
        bool stop_on_event = false;
        for (std::size_t e = 0; e < cfg.events.size(); ++e) {
            const auto& ev = cfg.events[e];
            const double g1 = ev.value(t_new, ynew);
            const bool falling = g_prev[e] > 0.0 && g1 <= 0.0;
            const bool rising = g_prev[e] < 0.0 && g1 >= 0.0;
            const bool hit = (ev.direction < 0 && falling) || (ev.direction > 0 && rising) ||
                             (ev.direction == 0 && (falling || rising));
            if (!hit) {
                g_prev[e] = g1;
                continue;
            }
            double lo = t, hi = t_new;
            double glo = g_prev[e];
            for (int it = 0; it < 200 && (hi - lo) > 1e-10; ++it) {
                const double mid = 0.5 * (lo + hi);
                const double gm = ev.value(mid, seg.eval(mid));
                if (std::signbit(gm) == std::signbit(glo) && gm != 0.0) {
                    lo = mid; glo = gm;
                } else {
                    hi = mid;
                }
            }
            const double t_ev = 0.5 * (lo + hi);
            out.events.push_back({t_ev, e, ev.name});
            if (ev.terminal && t_ev < t_stop) {
                t_stop = t_ev;
                y_stop = seg.eval(t_ev);
                stop_on_event = true;
            }
            g_prev[e] = g1;
        }

        // store points
        if (cfg.store_dt > 0.0) {
            while (next_store <= t_stop + 1e-15 && next_store <= t_end) {
                out.times.push_back(next_store);
                State ys = seg.eval(std::fmin(next_store, t_stop));
                project(ys);
                out.states.push_back(ys);
                next_store += cfg.store_dt;
            }
            if (stop_on_event || (done && t_stop == t_new)) {
                if (out.times.empty() || out.times.back() < t_stop) {
                    out.times.push_back(t_stop);
                    out.states.push_back(y_stop);
                }
            }
        } else {
            out.times.push_back(t_stop);
            out.states.push_back(y_stop);
        }

        if (stop_on_event) {
            out.reached_max_time = false;
            return out;
        }

        t = t_new;
        y = ynew;
        k1 = k7;  // first-same-as-last

        const double fac11 = std::pow(std::fmax(err, 1e-10), expo1);
        double fac = fac11 / std::pow(facold, beta_pi);
        fac = std::fmax(1.0 / fac_hi, std::fmin(1.0 / fac_lo, fac / safe));
        h = std::fmin(h / fac, cfg.max_step);
        facold = std::fmax(err, 1e-4);
    }

    out.reached_max_time = true;
    return out;
}

/// Integrates the reduced system at eps >= 0 with tolerances tightened for
/// entry-exit sensitivity and, for eps > 0, a step cap on the slow drift.
Trajectory<ReducedState> integrate_full_stiff(const Params& p, const ReducedState& initial,
                                              IntegrationConfig<ReducedState> cfg);

/// Convenience wrappers returning configured trajectories of the three systems.
Trajectory<ReducedState> integrate_reduced(const Params& p, const ReducedState& initial,
                                           const IntegrationConfig<ReducedState>& cfg);
Trajectory<ReducedState> integrate_layer(const Params& p, const ReducedState& initial,
                                         const IntegrationConfig<ReducedState>& cfg);
Trajectory<SlowPoint> integrate_slow(const Params& p, const SlowPoint& initial,
                                     const IntegrationConfig<SlowPoint>& cfg);
Trajectory<FullState> integrate_unreduced(const Params& p, const FullState& initial,
                                          const IntegrationConfig<FullState>& cfg);

} // namespace pairsirs
