#include "pairsirs/singular_orbit.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "pairsirs/bifurcation.hpp"
#include "pairsirs/model.hpp"

namespace pairsirs {

SlowPoint pi1_fast(const SlowPoint& point, const Params& p) {
    const double S_inf = entry_root_H(point.S, point.SS, p);
    return {S_inf, ss_infinity(point.S, point.SS, S_inf, p)};
}

SlowPoint pi1_fast_verified(const SlowPoint& point, const Params& p,
                            double delta, double tol) {
    const SlowPoint by_root = pi1_fast(point, p);
    const SlowPoint by_flow = layer_landing(point, p, delta);
    const double d = std::hypot(by_root.S - by_flow.S, by_root.SS - by_flow.SS);
    if (d > tol) {
        std::ostringstream os;
        os << "pi1_fast_verified: root-based landing (" << by_root.S << "," << by_root.SS
           << ") and layer integration (" << by_flow.S << "," << by_flow.SS
           << ") differ by " << d;
        throw ConsistencyError(os.str());
    }
    return by_root;
}

SlowPoint pi2_slow(const SlowPoint& entry, const Params& p, const ExitOptions& opt) {
    return exit_time(entry, p, opt).exit;
}

CycleCandidate find_candidate_cycle(const Params& p, double S0_init,
                                    const CycleOptions& opt) {
    p.validate();
    if (r0(p) <= 1.0)
        throw std::domain_error("find_candidate_cycle: requires R0 > 1");
    CycleCandidate c;
    double S0 = S0_init, SS0 = p.n * S0_init * S0_init;
    c.iterates.push_back(S0);
    for (int k = 0; k < 200; ++k) {
        c.iterations = k + 1;
        SlowPoint next;
        try {
            const SlowPoint entry = pi1_fast({S0, SS0}, p);
            next = opt.parabola_shortcut ? parabola_exit_point(entry.S, p)
                                         : pi2_slow(entry, p, opt.exit);
        } catch (const std::domain_error& e) {
            c.S0 = S0;
            c.SS0 = SS0;
            c.converged = false;
            c.note = std::string("iterate left the admissible region: ") + e.what();
            return c;
        }
        if (!(next.S > 0.0 && next.S < 1.0)) {
            // damp overshoots of the unit interval rather than giving up
            next.S = 0.5 * (S0 + std::clamp(next.S, 0.0, 1.0));
            next.SS = p.n * next.S * next.S;
        }
        const double dS = std::fabs(next.S - S0);
        S0 = next.S;
        SS0 = next.SS;
        c.iterates.push_back(S0);
        if (dS < 1e-8) {
            c.S0 = S0;
            c.SS0 = SS0;
            c.converged = true;
            return c;
        }
    }
    c.S0 = S0;
    c.SS0 = SS0;
    c.converged = false;
    c.note = "no convergence within 200 iterations";
    return c;
}

IntervalImage interval_test(const Params& p, const SlowPoint& candidate,
                            const IntervalTestOptions& opt) {
    p.validate();
    IntervalImage im;
    im.S0 = candidate.S;
    if (opt.samples < 1 || opt.width < 0.0)
        throw std::domain_error("interval_test: need samples >= 1 and width >= 0");

    const int m = (opt.width == 0.0) ? 1 : opt.samples;
    im.J1.resize(m);
    im.J2.resize(m);
    im.J3.resize(m);
    im.errors.resize(m);
    for (int i = 0; i < m; ++i) {
        const double off = (m == 1) ? 0.0
                                    : -opt.width / 2.0 + opt.width * i / (m - 1.0);
        im.J1[i] = candidate.SS + off;
    }

    parallel_for(opt.policy, m, [&](std::ptrdiff_t i) {
        try {
            const SlowPoint entry = pi1_fast({im.S0, im.J1[i]}, p);
            im.J2[i] = entry;
            im.J3[i] = opt.parabola_shortcut ? parabola_exit_point(entry.S, p)
                                             : pi2_slow(entry, p, opt.exit);
        } catch (const std::exception& e) {
            im.errors[i] = e.what();
            im.J2[i] = {std::nan(""), std::nan("")};
            im.J3[i] = {std::nan(""), std::nan("")};
        }
    });

    if (m < 2) {
        im.verdict = Transversality::Undecided;
        return im;
    }

    // crossing of the SS offset along the sample index
    im.verdict = Transversality::NoCrossing;
    for (int i = 0; i + 1 < m; ++i) {
        if (!im.errors[i].empty() || !im.errors[i + 1].empty()) continue;
        const double d0 = im.J3[i].SS - im.J1[i];
        const double d1 = im.J3[i + 1].SS - im.J1[i + 1];
        if (d0 == 0.0 || std::signbit(d0) != std::signbit(d1)) {
            const double slope = (d1 - d0) / (im.J1[i + 1] - im.J1[i]);
            if (slope != 0.0) {
                im.verdict = Transversality::Transversal;
                im.crossing_slope = slope;
                break;
            }
        }
    }
    bool any_ok = false;
    for (const auto& e : im.errors) any_ok |= e.empty();
    if (!any_ok) im.verdict = Transversality::Undecided;
    return im;
}

void write_interval_csv(const std::string& path, const IntervalImage& im,
                        const Metadata& meta) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << metadata_comment_block(meta);
    os << "sample,S0,SS0,S_inf,SS_inf,S1,SS1,error\n";
    os.precision(17);
    for (std::size_t i = 0; i < im.J1.size(); ++i) {
        os << i << "," << im.S0 << "," << im.J1[i] << "," << im.J2[i].S << ","
           << im.J2[i].SS << "," << im.J3[i].S << "," << im.J3[i].SS << ","
           << im.errors[i] << "\n";
    }
}

void write_interval_svg(const std::string& path, const IntervalImage& im,
                        const Params& p) {
    SvgPlot plot("J1 (section) vs J3 (return)", "S", "SS");
    std::ostringstream meta;
    meta << "beta=" << p.beta << " gamma=" << p.gamma << " n=" << p.n
         << " verdict=" << (im.verdict == Transversality::Transversal
                                ? "transversal"
                                : im.verdict == Transversality::NoCrossing
                                      ? "no-crossing"
                                      : "undecided");
    plot.set_comment(meta.str());
    plot.add_line({im.S0, im.S0}, {im.J1.front(), im.J1.back()}, "red", 2.0);
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < im.J3.size(); ++i) {
        if (!im.errors[i].empty()) continue;
        xs.push_back(im.J3[i].S);
        ys.push_back(im.J3[i].SS);
    }
    plot.add_line(xs, ys, "blue", 1.5);
    plot.add_points(xs, ys, "blue", 2.0);
    plot.write(path);
}

AttractorReport detect_attractor(const Trajectory<ReducedState>& traj, const Params& p,
                                 const AttractorOptions& opt) {
    AttractorReport rep;
    rep.params = p;
    if (traj.times.size() < 8) {
        rep.note = "tail too short";
        return rep;
    }
    const double t_end = traj.end_time();
    const double t_tail = t_end * (1.0 - opt.tail_fraction);
    std::size_t first = 0;
    while (first < traj.times.size() && traj.times[first] < t_tail) ++first;
    if (traj.times.size() - first < 4) {
        rep.note = "tail too short";
        return rep;
    }

    double Imin = traj.states[first].I, Imax = Imin;
    for (std::size_t k = first; k < traj.states.size(); ++k) {
        Imin = std::min(Imin, traj.states[k].I);
        Imax = std::max(Imax, traj.states[k].I);
    }
    rep.amplitude = Imax - Imin;

    // deviation from the refined endemic equilibrium
    bool have_eq = false;
    ReducedState eq;
    try {
        eq = refine_equilibrium(p);
        have_eq = true;
    } catch (const std::exception&) {
        have_eq = false;
    }
    if (have_eq) {
        double dev = 0.0;
        for (std::size_t k = first; k < traj.states.size(); ++k)
            for (std::size_t i = 0; i < ReducedState::size(); ++i)
                dev = std::max(dev, std::fabs(traj.states[k][i] - eq[i]));
        rep.deviation = dev;
        if (dev < opt.equilibrium_dev) {
            rep.kind = AttractorKind::Equilibrium;
            return rep;
        }
    }

    // periodic tail: enough I-maxima with consistent spacing and real amplitude
    std::vector<double> peaks;
    const double floor_level = Imin + 0.25 * rep.amplitude;
    for (std::size_t k = first + 1; k + 1 < traj.states.size(); ++k) {
        const double a = traj.states[k - 1].I, b = traj.states[k].I,
                     c = traj.states[k + 1].I;
        if (b >= a && b > c && b > floor_level) peaks.push_back(traj.times[k]);
    }
    if (peaks.size() >= opt.min_peaks && rep.amplitude > opt.amplitude_factor * p.epsilon) {
        double gmin = peaks[1] - peaks[0], gmax = gmin, gsum = 0.0;
        for (std::size_t i = 1; i < peaks.size(); ++i) {
            const double gap = peaks[i] - peaks[i - 1];
            gmin = std::min(gmin, gap);
            gmax = std::max(gmax, gap);
            gsum += gap;
        }
        const double gmean = gsum / (peaks.size() - 1.0);
        if ((gmax - gmin) / gmean < opt.period_spread) {
            rep.kind = AttractorKind::LimitCycle;
            rep.period = gmean;
            return rep;
        }
        rep.note = "irregular peak spacing";
    }

    // constant tail that is not the endemic equilibrium (e.g. a C0 point)
    const ReducedState& ref = traj.states[first];
    double dev_const = 0.0;
    for (std::size_t k = first; k < traj.states.size(); ++k)
        for (std::size_t i = 0; i < ReducedState::size(); ++i)
            dev_const = std::max(dev_const, std::fabs(traj.states[k][i] - ref[i]));
    if (dev_const < 1e-9) {
        rep.kind = AttractorKind::Equilibrium;
        rep.deviation = dev_const;
        rep.note = "constant tail";
        return rep;
    }

    rep.kind = AttractorKind::Undecided;
    return rep;
}

} // namespace pairsirs
