#include "pairsirs/integrate.hpp"

#include <algorithm>

#include "pairsirs/model.hpp"

namespace pairsirs {

namespace {

template <class State>
IntegrationConfig<State> with_default_floor(IntegrationConfig<State> cfg) {
    if (cfg.nonneg_floor == 0.0) cfg.nonneg_floor = 100.0 * cfg.abs_tol;
    return cfg;
}

} // namespace

Trajectory<ReducedState> integrate_reduced(const Params& p, const ReducedState& initial,
                                           const IntegrationConfig<ReducedState>& cfg) {
    p.validate();
    auto rhs = [&p](double, const ReducedState& y) { return reduced_rhs_raw(y, p); };
    return integrate(rhs, initial, with_default_floor(cfg), Regime::Full);
}

Trajectory<ReducedState> integrate_layer(const Params& p, const ReducedState& initial,
                                         const IntegrationConfig<ReducedState>& cfg) {
    Params p0 = p;
    p0.epsilon = 0.0;
    p0.validate();
    auto rhs = [p0](double, const ReducedState& y) { return reduced_rhs_raw(y, p0); };
    return integrate(rhs, initial, with_default_floor(cfg), Regime::Fast);
}

Trajectory<SlowPoint> integrate_slow(const Params& p, const SlowPoint& initial,
                                     const IntegrationConfig<SlowPoint>& cfg) {
    p.validate();
    auto rhs = [&p](double, const SlowPoint& x) { return slow_rhs(x, p); };
    return integrate(rhs, initial, cfg, Regime::Slow);
}

Trajectory<FullState> integrate_unreduced(const Params& p, const FullState& initial,
                                          const IntegrationConfig<FullState>& cfg) {
    p.validate();
    auto rhs = [&p](double, const FullState& y) { return full_rhs_raw(y, p); };
    return integrate(rhs, initial, with_default_floor(cfg), Regime::Full);
}

Trajectory<ReducedState> integrate_full_stiff(const Params& p, const ReducedState& initial,
                                              IntegrationConfig<ReducedState> cfg) {
    p.validate();
    cfg.rel_tol = std::min(cfg.rel_tol, 1e-9);
    cfg.abs_tol = std::min(cfg.abs_tol, 1e-11);
    if (p.epsilon > 0.0)
        cfg.max_step = std::min(cfg.max_step, 0.05 / p.epsilon);
    return integrate_reduced(p, initial, cfg);
}

} // namespace pairsirs
