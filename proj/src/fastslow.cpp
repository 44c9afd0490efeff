#include "pairsirs/fastslow.hpp"

#include <atomic>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "pairsirs/io.hpp"
#include "pairsirs/model.hpp"
#include "pairsirs/quadrature.hpp"
#include "pairsirs/rootfind.hpp"

namespace pairsirs {

double constant_of_motion(double S, double SS, const Params& p) {
    p.validate();
    if (!(S > 0.0) || !(SS > 0.0))
        throw std::domain_error("constant_of_motion: requires S > 0 and SS > 0");
    return std::log(SS) - 2.0 * (p.n - 1.0) / p.n * std::log(S);
}

double constant_of_motion(const SlowPoint& x, const Params& p) {
    return constant_of_motion(x.S, x.SS, p);
}

double constant_of_motion(const ReducedState& y, const Params& p) {
    return constant_of_motion(y.S, y.SS, p);
}

double ss_infinity(double S0, double SS0, double S_inf, const Params& p) {
    p.validate();
    if (!(S0 > 0.0)) throw std::domain_error("ss_infinity: requires S0 > 0");
    if (S_inf < 0.0) throw std::domain_error("ss_infinity: S_inf must be >= 0");
    return SS0 * std::pow(S_inf / S0, (2.0 * p.n - 2.0) / p.n);
}

namespace {

// Shared root machinery for H and G: both are increasing on (0, S*) with a
// negative value at 0 and the analytic maximum at S* from the uniqueness proof.
double fast_landing_root(double S0, double SS0, const Params& p) {
    const double n = p.n, b = p.beta, g = p.gamma;
    const double L = n * (b + g) / (b * (n - 1.0));
    const double r1_S0 = b * (n - 1.0) / (b + g) * S0;
    if (!(r1_S0 > 1.0))
        throw std::domain_error("entry root: start not in epidemic region (R1 S0 <= 1)");
    if (!(SS0 > L * S0))
        throw std::domain_error("entry root: start not in repelling region (SS0 <= L S0)");

    const double s0n = std::pow(S0, 1.0 / n);
    const double c1 = n * (b + g) / b;
    const double c2 = SS0 * std::pow(S0, 2.0 / n - 2.0);
    const double tail = SS0 * std::pow(S0, 1.0 / n - 1.0);
    auto H = [&](double x) {
        return c1 * (std::pow(x, 1.0 / n) - s0n) - c2 * std::pow(x, 1.0 - 1.0 / n) + tail;
    };
    auto dH = [&](double x) {
        return c1 / n * std::pow(x, 1.0 / n - 1.0) -
               c2 * (n - 1.0) / n * std::pow(x, -1.0 / n);
    };

    const double S_star = std::pow(L * S0 / SS0, n / (n - 2.0)) * S0;
    if (!(H(0.0) < 0.0 && H(S_star) > 0.0))
        throw std::domain_error("entry root: bracket endpoints do not change sign");
    const double seed = bisect(H, 0.0, S_star, 1e-14 * S_star);
    return newton_polish(H, dH, seed, 0.0, S_star, 1e-13);
}

} // namespace

double entry_root_H(double S0, double SS0, const Params& p) {
    p.validate();
    if (!(S0 > 0.0) || !(SS0 > 0.0))
        throw std::domain_error("entry_root_H: requires S0 > 0 and SS0 > 0");
    return fast_landing_root(S0, SS0, p);
}

double entry_root_G(double S0, const Params& p) {
    p.validate();
    if (!(S0 > 0.0)) throw std::domain_error("entry_root_G: requires S0 > 0");
    // G = H/n with SS0 = n S0^2; same zero.
    return fast_landing_root(S0, p.n * S0 * S0, p);
}

SlowPoint slow_solution(const SlowPoint& entry, double tau, const Params& p) {
    p.validate();
    if (!(tau >= 0.0)) throw std::domain_error("slow_solution: tau must be >= 0");
    const double A = entry.S - 1.0, B = entry.SS - p.n;
    const double e1 = std::exp(-tau), e2 = e1 * e1;
    SlowPoint x;
    x.S = A * e1 + 1.0;
    x.SS = 2.0 * A * p.n * e2 * (std::exp(tau) - 1.0) + B * e2 + p.n;
    return x;
}

double lambda5_slow(const SlowPoint& entry, double tau, const Params& p) {
    const SlowPoint x = slow_solution(entry, tau, p);
    if (x.S < kRatioFloor) {
        // only reachable at tau = 0 from the origin, where SS = n S^2 forces
        // the ratio limit SS/S -> 0
        return -(p.gamma + p.beta);
    }
    return p.kappa() * (x.SS / x.S) - (p.gamma + p.beta);
}

double lambda5_integral(const SlowPoint& entry, double T, const Params& p) {
    const double n = p.n, A = entry.S - 1.0, B = entry.SS - n;
    const double k = p.kappa();
    const double eT = std::exp(-T);
    double val = n * T + (2.0 * A * n - B) * (eT - 1.0) / A;
    const double q = (A * (A + 2.0) * n - B) / (A * A);
    if (q != 0.0)
        val += q * (std::log(A + 1.0) - std::log(A * eT + 1.0));
    return -(p.gamma + p.beta) * T + k * val;
}

EntryExitRecord exit_time(const SlowPoint& entry, const Params& p, const ExitOptions& opt) {
    p.validate();
    if (!entry.finite() || entry.S < 0.0 || entry.SS < 0.0)
        throw std::domain_error("exit_time: invalid entry point");
    const double A = entry.S - 1.0;
    if (A == 0.0)
        throw std::domain_error("exit_time: degenerate entry S_inf = 1 (A = 0)");
    if (entry.S > 1.0)
        throw std::domain_error("exit_time: entry S must lie in [0, 1)");
    if (entry.S < kRatioFloor && entry.SS > kRatioFloor)
        throw std::domain_error("exit_time: SS must vanish when S = 0");
    if (r0(p) <= 1.0)
        throw std::domain_error("exit_time: requires R0 > 1 (lambda5 never turns positive)");

    auto lam = [&](double tau) { return lambda5_slow(entry, tau, p); };
    if (!(lam(0.0) < 0.0))
        throw std::domain_error("exit_time: entry not in attracting region (lambda5 >= 0)");

    // lambda5 tends to gamma (R0 - 1) > 0; bracket its unique zero first.
    double hi = grow_upper_bracket(lam, 0.0, 1.0);
    const double tau_zero = bisect(lam, 0.0, hi, 1e-12);

    auto phi = [&](double T) { return lambda5_integral(entry, T, p); };
    // Phi(tau_zero) < 0 since lambda5 < 0 on [0, tau_zero); grow until positive.
    double T_hi = grow_upper_bracket(phi, tau_zero, tau_zero * 1.5 + 0.5);
    const double T_closed = bisect(phi, tau_zero, T_hi, opt.time_tol);

    bool verify = opt.verify == ExitVerify::Always;
    if (opt.verify == ExitVerify::Sampled) {
        static std::atomic<unsigned> counter{0};
        verify = (counter.fetch_add(1, std::memory_order_relaxed) % 100) == 0;
    }
    if (verify) {
        auto phi_quad = [&](double T) { return integrate_adaptive(lam, 0.0, T, 1e-10); };
        const double T_quad = bisect(phi_quad, tau_zero, T_hi, opt.time_tol);
        if (std::fabs(T_quad - T_closed) > opt.consistency_tol) {
            std::ostringstream os;
            os << "exit_time: closed form T=" << T_closed << " and quadrature T="
               << T_quad << " disagree beyond " << opt.consistency_tol;
            throw ConsistencyError(os.str());
        }
    }

    EntryExitRecord rec;
    rec.entry = entry;
    rec.exit_time = T_closed;
    rec.exit = slow_solution(entry, T_closed, p);
    rec.method = "closed-form";
    rec.verified = verify;
    return rec;
}

std::string entry_exit_json(const EntryExitRecord& rec) {
    nlohmann::json j;
    j["version"] = kArtifactVersion;
    j["entry"] = {{"S", rec.entry.S}, {"SS", rec.entry.SS}};
    j["exit_time"] = rec.exit_time;
    j["exit"] = {{"S", rec.exit.S}, {"SS", rec.exit.SS}};
    j["method"] = rec.method;
    j["verified"] = rec.verified;
    return j.dump(2);
}

void write_entry_exit_json(const std::string& path, const EntryExitRecord& rec) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << entry_exit_json(rec) << "\n";
}

double parabola_exit(double S_entry, const Params& p) {
    p.validate();
    const double n = p.n, b = p.beta, g = p.gamma;
    const double C = ((n - 2.0) * b - g) / (b * (n - 1.0));
    if (C <= 0.0)
        throw std::domain_error("parabola_exit: requires R0 > 1 (C > 0)");
    const double S_turn = (b + g) / (b * (n - 1.0));  // = 1/R1 = 1 - C
    if (!(S_entry >= 0.0 && S_entry < S_turn))
        throw std::domain_error("parabola_exit: entry must lie in [0, 1/R1)");

    auto h = [&](double x) { return std::pow(1.0 - x, C) * std::exp(x); };
    const double target = h(S_entry);
    auto f = [&](double x) { return h(x) - target; };
    auto df = [&](double x) {
        return std::pow(1.0 - x, C - 1.0) * (1.0 - C - x) * std::exp(x);
    };
    // h decreases from its maximum at 1/R1 to h(1) = 0, so f brackets on
    // (1/R1, 1).
    const double lo = S_turn, hix = 1.0 - 1e-15;
    const double seed = bisect(f, lo, hix, 1e-14);
    return newton_polish(f, df, seed, lo, 1.0, 1e-14);
}

SlowPoint parabola_exit_point(double S_entry, const Params& p) {
    const double S = parabola_exit(S_entry, p);
    return {S, p.n * S * S};
}

ReducedState proportional_seed(const SlowPoint& x, double delta) {
    if (!(x.S > 0.0) || delta <= 0.0 || delta >= x.S)
        throw std::domain_error("proportional_seed: need 0 < delta < S");
    const double q = delta / x.S;
    ReducedState y;
    y.S = x.S - delta;
    y.I = delta;
    y.SS = x.SS * (1.0 - q) * (1.0 - q);
    y.SI = x.SS * q * (1.0 - q);
    y.II = x.SS * q * q;
    return y;
}

SlowPoint layer_landing(const SlowPoint& x, const Params& p, double delta,
                        double tol, double max_time) {
    const ReducedState y0 = proportional_seed(x, delta);
    IntegrationConfig<ReducedState> cfg;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-13;
    cfg.max_time = max_time;
    Event<ReducedState> done;
    done.value = [tol](double, const ReducedState& y) { return y.I + y.SI + y.II - tol; };
    done.direction = -1;
    done.terminal = true;
    done.name = "infected-extinct";
    cfg.events.push_back(done);
    const auto traj = integrate_layer(p, y0, cfg);
    const ReducedState& yl = traj.back();
    return {yl.S, yl.SS};
}

} // namespace pairsirs
