#include "pairsirs/bifurcation.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <sstream>

#include "pairsirs/errors.hpp"
#include "pairsirs/model.hpp"

namespace pairsirs {

std::vector<double> fd_jacobian(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                                const std::vector<double>& x) {
    const std::size_t m = x.size();
    std::vector<double> J(m * m);
    for (std::size_t j = 0; j < m; ++j) {
        const double h = 1e-6 * std::fmax(1.0, std::fabs(x[j]));
        std::vector<double> xp = x, xm = x;
        xp[j] += h;
        xm[j] -= h;
        const auto fp = f(xp), fm = f(xm);
        for (std::size_t i = 0; i < m; ++i) J[i * m + j] = (fp[i] - fm[i]) / (2.0 * h);
    }
    return J;
}

std::vector<std::complex<double>> dense_eigenvalues(const std::vector<double>& a, int m) {
    Eigen::MatrixXd A(m, m);
    for (int i = 0; i < m; ++i)
        for (int j = 0; j < m; ++j) A(i, j) = a[i * m + j];
    Eigen::EigenSolver<Eigen::MatrixXd> es(A, false);
    if (es.info() != Eigen::Success)
        throw ConvergenceError("dense_eigenvalues: eigensolver failed");
    std::vector<std::complex<double>> ev(m);
    for (int i = 0; i < m; ++i) ev[i] = es.eigenvalues()[i];
    std::sort(ev.begin(), ev.end(), [](const auto& u, const auto& v) {
        if (u.real() != v.real()) return u.real() > v.real();
        return u.imag() > v.imag();
    });
    return ev;
}

namespace {

std::vector<double> rhs_vec(const std::vector<double>& x, const Params& p) {
    ReducedState y;
    for (std::size_t i = 0; i < 5; ++i) y[i] = x[i];
    const ReducedState d = reduced_rhs_raw(y, p);
    return {d.S, d.I, d.SS, d.SI, d.II};
}

double residual_norm(const std::vector<double>& r) {
    double v = 0.0;
    for (double q : r) v = std::fmax(v, std::fabs(q));
    return v;
}

} // namespace

namespace {

ReducedState newton_refine(const ReducedState& seed, const Params& p, double tol,
                           int max_iter) {
    std::vector<double> x = {seed.S, seed.I, seed.SS, seed.SI, seed.II};
    auto f = [&p](const std::vector<double>& v) { return rhs_vec(v, p); };

    std::vector<double> r = f(x);
    double rn = residual_norm(r);
    for (int it = 0; it < max_iter && rn > tol; ++it) {
        const auto J = fd_jacobian(f, x);
        Eigen::MatrixXd A(5, 5);
        Eigen::VectorXd b(5);
        for (int i = 0; i < 5; ++i) {
            b(i) = -r[i];
            for (int j = 0; j < 5; ++j) A(i, j) = J[i * 5 + j];
        }
        const Eigen::VectorXd dx = A.fullPivLu().solve(b);
        // damped update: halve until the residual does not grow
        double lambda = 1.0;
        std::vector<double> x_new(5);
        for (int half = 0; half < 8; ++half, lambda *= 0.5) {
            for (int i = 0; i < 5; ++i) x_new[i] = x[i] + lambda * dx(i);
            const auto r_new = f(x_new);
            if (residual_norm(r_new) < rn || lambda < 1.0 / 128) {
                x = x_new;
                r = r_new;
                rn = residual_norm(r);
                break;
            }
        }
    }
    if (rn > tol) {
        std::ostringstream os;
        os << "refine_equilibrium: no convergence in " << max_iter
           << " iterations, last residual " << rn;
        throw ConvergenceError(os.str());
    }
    ReducedState out;
    for (std::size_t i = 0; i < 5; ++i) out[i] = x[i];
    return out;
}

} // namespace

ReducedState refine_equilibrium(const Params& p, double tol, int max_iter) {
    p.validate();
    // The first-order series only seeds Newton reliably at small eps; for
    // larger eps it can sit next to the disease-free root (especially with R0
    // barely above 1), so walk the endemic branch up in eps instead.
    constexpr double kEpsStep = 0.05;
    Params q = p;
    q.epsilon = std::min(p.epsilon, 0.02);
    ReducedState x = newton_refine(endemic_equilibrium_series(q), q, tol, max_iter);
    while (q.epsilon < p.epsilon) {
        q.epsilon = std::min(p.epsilon, q.epsilon + kEpsStep);
        x = newton_refine(x, q, tol, max_iter);
    }
    // a collapse onto the disease-free root leaves I at roundoff scale
    if (!(x.I > 1e-12) || x.delta_violation(p) > 1e-6)
        throw ConvergenceError("refine_equilibrium: left the endemic branch");
    return x;
}

Spectrum5 jacobian_spectrum(const ReducedState& state, const Params& p) {
    p.validate();
    if (!state.finite()) throw std::domain_error("jacobian_spectrum: non-finite state");
    auto f = [&p](const std::vector<double>& v) { return rhs_vec(v, p); };
    const auto J = fd_jacobian(f, {state.S, state.I, state.SS, state.SI, state.II});
    const auto ev = dense_eigenvalues(J, 5);
    Spectrum5 out;
    std::copy(ev.begin(), ev.end(), out.begin());
    return out;
}

const char* axis_name(Axis a) {
    switch (a) {
        case Axis::N: return "n";
        case Axis::Beta: return "beta";
        default: return "epsilon";
    }
}

void set_axis(Params& p, Axis a, double value) {
    switch (a) {
        case Axis::N: p.n = value; break;
        case Axis::Beta: p.beta = value; break;
        case Axis::Epsilon: p.epsilon = value; break;
    }
}

double get_axis(const Params& p, Axis a) {
    switch (a) {
        case Axis::N: return p.n;
        case Axis::Beta: return p.beta;
        default: return p.epsilon;
    }
}

namespace {

constexpr double kImagTol = 1e-8;

// leading non-real eigenvalue with positive imaginary part, by max real part
std::optional<std::complex<double>> leading_pair(const Spectrum5& sp) {
    std::optional<std::complex<double>> best;
    for (const auto& z : sp) {
        if (z.imag() <= kImagTol) continue;
        if (!best || z.real() > best->real()) best = z;
    }
    return best;
}

// non-real eigenvalue nearest to a tracked one (nearest-neighbor matching)
std::optional<std::complex<double>> nearest_pair(const Spectrum5& sp,
                                                 std::complex<double> track) {
    std::optional<std::complex<double>> best;
    double bd = 0.0;
    for (const auto& z : sp) {
        if (z.imag() <= kImagTol) continue;
        const double d = std::abs(z - track);
        if (!best || d < bd) {
            best = z;
            bd = d;
        }
    }
    return best;
}

} // namespace

Classification classify_equilibrium(const Params& p) {
    Classification c;
    try {
        p.validate();
        if (r0(p) <= 1.0) {
            // no endemic equilibrium; disease-free state attracts
            c.cls = StabilityClass::StableEquilibrium;
            return c;
        }
        const ReducedState eq = refine_equilibrium(p);
        c.spectrum = jacobian_spectrum(eq, p);
        if (auto lp = leading_pair(c.spectrum)) {
            c.leading = *lp;
            c.has_pair = true;
        }
        // stability decides the class; past the Hopf the pair can merge into
        // two real eigenvalues, which is still the unstable (cycle) side
        const double max_re = c.spectrum[0].real();
        c.cls = max_re < 0.0 ? StabilityClass::StableEquilibrium : StabilityClass::CycleSide;
        return c;
    } catch (const std::exception& e) {
        c.cls = StabilityClass::Failed;
        c.error = e.what();
        return c;
    }
}

std::optional<HopfPoint> hopf_bisect(const Params& base, Axis axis, double lo, double hi,
                                     double param_tol) {
    auto eval = [&](double v, std::optional<std::complex<double>> track)
        -> std::optional<std::complex<double>> {
        Params p = base;
        set_axis(p, axis, v);
        const Classification c = classify_equilibrium(p);
        if (c.cls == StabilityClass::Failed) return std::nullopt;
        if (!c.has_pair) return std::nullopt;
        if (track) return nearest_pair(c.spectrum, *track);
        return c.leading;
    };

    auto z_lo = eval(lo, std::nullopt);
    if (!z_lo) return std::nullopt;
    auto z_hi = eval(hi, z_lo);
    if (!z_hi) return std::nullopt;
    if (std::signbit(z_lo->real()) == std::signbit(z_hi->real())) return std::nullopt;

    double a = lo, b = hi;
    std::complex<double> za = *z_lo;
    std::complex<double> zc = za;
    while (b - a > param_tol) {
        const double m = 0.5 * (a + b);
        const auto zm = eval(m, zc);
        if (!zm) return std::nullopt;
        zc = *zm;
        if (std::signbit(zm->real()) == std::signbit(za.real())) {
            a = m;
            za = *zm;
        } else {
            b = m;
        }
    }
    const double v = 0.5 * (a + b);
    const auto z = eval(v, zc);
    if (!z) return std::nullopt;
    Params p = base;
    set_axis(p, axis, v);
    HopfPoint hp;
    hp.n = p.n;
    hp.beta = p.beta;
    hp.epsilon = p.epsilon;
    hp.critical_pair = *z;
    hp.frequency = z->imag();
    hp.axis = axis;
    return hp;
}

SweepGrid sweep_slice(const Params& base, Axis ax_x, double x_lo, double x_hi, int nx,
                      Axis ax_y, double y_lo, double y_hi, int ny,
                      const SweepOptions& opt) {
    if (nx < 2 || ny < 2)
        throw std::domain_error("sweep_slice: resolution must be >= 2 per axis");
    if (ax_x == ax_y) throw std::domain_error("sweep_slice: axes must differ");

    SweepGrid g;
    g.ax_x = ax_x;
    g.ax_y = ax_y;
    g.ax_fixed = (ax_x != Axis::N && ax_y != Axis::N)
                     ? Axis::N
                     : (ax_x != Axis::Beta && ax_y != Axis::Beta) ? Axis::Beta
                                                                   : Axis::Epsilon;
    g.fixed_value = get_axis(base, g.ax_fixed);
    g.xs.resize(nx);
    g.ys.resize(ny);
    for (int i = 0; i < nx; ++i) g.xs[i] = x_lo + (x_hi - x_lo) * i / (nx - 1.0);
    for (int j = 0; j < ny; ++j) g.ys[j] = y_lo + (y_hi - y_lo) * j / (ny - 1.0);
    g.cells.resize(static_cast<std::size_t>(nx) * ny);

    parallel_for(opt.policy, static_cast<std::ptrdiff_t>(g.cells.size()),
                 [&](std::ptrdiff_t idx) {
                     const int i = static_cast<int>(idx % nx);
                     const int j = static_cast<int>(idx / nx);
                     Params p = base;
                     set_axis(p, ax_x, g.xs[i]);
                     set_axis(p, ax_y, g.ys[j]);
                     SweepCell cell;
                     cell.x = g.xs[i];
                     cell.y = g.ys[j];
                     const Classification c = classify_equilibrium(p);
                     cell.cls = c.cls;
                     cell.leading = c.leading;
                     cell.has_pair = c.has_pair;
                     cell.error = c.error;
                     g.cells[idx] = cell;
                 });

    for (const auto& cell : g.cells)
        if (cell.cls == StabilityClass::Failed) ++g.failures;

    if (opt.refine_boundary) {
        auto differs = [](const SweepCell& a, const SweepCell& b) {
            return a.cls != StabilityClass::Failed && b.cls != StabilityClass::Failed &&
                   a.cls != b.cls;
        };
        for (int j = 0; j < ny; ++j) {
            for (int i = 0; i < nx; ++i) {
                if (i + 1 < nx && differs(g.at(i, j), g.at(i + 1, j))) {
                    Params p = base;
                    set_axis(p, ax_y, g.ys[j]);
                    if (auto hp = hopf_bisect(p, ax_x, g.xs[i], g.xs[i + 1]))
                        g.boundary.push_back(*hp);
                }
                if (j + 1 < ny && differs(g.at(i, j), g.at(i, j + 1))) {
                    Params p = base;
                    set_axis(p, ax_x, g.xs[i]);
                    if (auto hp = hopf_bisect(p, ax_y, g.ys[j], g.ys[j + 1]))
                        g.boundary.push_back(*hp);
                }
            }
        }
    }
    return g;
}

void write_sweep_csv(const std::string& path, const SweepGrid& grid, const Metadata& meta) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << metadata_comment_block(meta);
    os << axis_name(grid.ax_x) << "," << axis_name(grid.ax_y)
       << ",class,leading_re,leading_im,error\n";
    os.precision(17);
    for (std::size_t j = 0; j < grid.ys.size(); ++j) {
        for (std::size_t i = 0; i < grid.xs.size(); ++i) {
            const auto& c = grid.at(i, j);
            const char* cls = c.cls == StabilityClass::StableEquilibrium
                                  ? "stable-equilibrium"
                                  : c.cls == StabilityClass::CycleSide ? "limit-cycle-side"
                                                                        : "failed";
            os << c.x << "," << c.y << "," << cls << "," << c.leading.real() << ","
               << c.leading.imag() << "," << c.error << "\n";
        }
    }
}

void write_hopf_json(const std::string& path, const std::vector<HopfPoint>& points,
                     const Metadata& meta) {
    nlohmann::json j;
    j["version"] = kArtifactVersion;
    for (const auto& [k, v] : meta) j["config"][k] = v;
    j["hopf_points"] = nlohmann::json::array();
    for (const auto& hp : points) {
        j["hopf_points"].push_back({{"n", hp.n},
                                    {"beta", hp.beta},
                                    {"epsilon", hp.epsilon},
                                    {"re", hp.critical_pair.real()},
                                    {"im", hp.critical_pair.imag()},
                                    {"frequency", hp.frequency},
                                    {"axis", axis_name(hp.axis)}});
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << j.dump(2) << "\n";
}

void write_sweep_svg(const std::string& path, const SweepGrid& grid) {
    SvgPlot plot("Hopf boundary", axis_name(grid.ax_x), axis_name(grid.ax_y));
    std::ostringstream c;
    c << "fixed " << axis_name(grid.ax_fixed) << "=" << grid.fixed_value
      << " boundary points=" << grid.boundary.size();
    plot.set_comment(c.str());
    std::vector<double> bx, by;
    for (const auto& hp : grid.boundary) {
        Params p;
        p.n = hp.n;
        p.beta = hp.beta;
        p.epsilon = hp.epsilon;
        bx.push_back(get_axis(p, grid.ax_x));
        by.push_back(get_axis(p, grid.ax_y));
    }
    plot.add_points(bx, by, "green", 2.0);
    // light scatter of cycle-side cells for context
    std::vector<double> cx, cy;
    for (const auto& cell : grid.cells) {
        if (cell.cls == StabilityClass::CycleSide) {
            cx.push_back(cell.x);
            cy.push_back(cell.y);
        }
    }
    plot.add_points(cx, cy, "#c0d8f0", 1.0);
    plot.write(path);
}

double largest_hopf_eps(const Params& base, double n, const std::vector<double>& betas,
                        double eps_lo, double eps_hi, double eps_tol, ExecPolicy policy) {
    std::vector<double> per_beta(betas.size(), 0.0);
    parallel_for(policy, static_cast<std::ptrdiff_t>(betas.size()), [&](std::ptrdiff_t k) {
        Params p = base;
        p.n = n;
        p.beta = betas[k];
        auto unstable = [&](double eps) {
            Params q = p;
            q.epsilon = eps;
            const Classification c = classify_equilibrium(q);
            return c.cls == StabilityClass::CycleSide;
        };
        if (p.beta * (n - 2.0) <= p.gamma) return;  // R0 <= 1: never
        if (!unstable(eps_lo)) return;
        double lo = eps_lo, hi = lo;
        do {
            lo = hi;
            hi = std::min(hi * 1.4 + eps_tol, eps_hi);
        } while (hi < eps_hi && unstable(hi));
        if (hi >= eps_hi && unstable(hi)) {
            per_beta[k] = eps_hi;
            return;
        }
        while (hi - lo > eps_tol) {
            const double m = 0.5 * (lo + hi);
            if (unstable(m)) lo = m;
            else hi = m;
        }
        per_beta[k] = lo;
    });
    double best = 0.0;
    for (double v : per_beta) best = std::fmax(best, v);
    return best;
}

} // namespace pairsirs
