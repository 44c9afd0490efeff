// Command-line front end: batch computations over the pair-approximation
// SIRS model, its fast-slow limit systems, Hopf sweeps and network
// cross-validation. Exit codes: 0 success, 2 usage/precondition error,
// 3 runtime computation failure.

#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <nlohmann/json.hpp>
#include <sstream>
#include <string>

#include "pairsirs/bifurcation.hpp"
#include "pairsirs/fastslow.hpp"
#include "pairsirs/integrate.hpp"
#include "pairsirs/io.hpp"
#include "pairsirs/model.hpp"
#include "pairsirs/netsim.hpp"
#include "pairsirs/rng.hpp"
#include "pairsirs/singular_orbit.hpp"

using namespace pairsirs;

namespace {

constexpr int kUsageExit = 2;
constexpr int kRuntimeExit = 3;

struct ParamFlags {
    double beta = 2.0, gamma = 1.0, eps = 0.0, n = 4.0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--beta", beta, "infection rate per SI edge");
        cmd->add_option("--gamma", gamma, "recovery rate");
        cmd->add_option("--eps", eps, "waning (loss of immunity) rate");
        cmd->add_option("--n", n, "node degree");
    }
    Params params() const { return Params{beta, gamma, eps, n}; }
    void describe(Metadata& m) const {
        m.emplace_back("beta", std::to_string(beta));
        m.emplace_back("gamma", std::to_string(gamma));
        m.emplace_back("epsilon", std::to_string(eps));
        m.emplace_back("n", std::to_string(n));
    }
};

int run_integrate(const ParamFlags& pf, const std::string& system, double S, double I,
                  double SS, double SI, double II, double tmax, double rtol, double atol,
                  double store_dt, const std::string& out, const std::string& svg,
                  const std::string& plot_components) {
    const Params p = pf.params();
    Metadata meta;
    meta.emplace_back("command", "integrate");
    meta.emplace_back("system", system);
    pf.describe(meta);
    meta.emplace_back("tmax", std::to_string(tmax));

    auto render_svg = [&](const auto& traj) {
        if (svg.empty()) return;
        using State = std::decay_t<decltype(traj.states[0])>;
        SvgPlot plot("trajectory (" + system + ")", "t", plot_components);
        std::ostringstream mc;
        mc << kArtifactVersion;
        for (const auto& [k, v] : meta) mc << " " << k << "=" << v;
        plot.set_comment(mc.str());
        std::istringstream comps(plot_components);
        std::string name;
        const char* colors[] = {"blue", "red", "green", "orange", "purple"};
        int ci = 0;
        while (std::getline(comps, name, ',')) {
            int idx = -1;
            for (std::size_t k = 0; k < State::size(); ++k)
                if (name == State::names()[k]) idx = static_cast<int>(k);
            if (idx < 0) throw std::domain_error("unknown component: " + name);
            std::vector<double> ys(traj.times.size());
            for (std::size_t k = 0; k < traj.times.size(); ++k) ys[k] = traj.states[k][idx];
            plot.add_line(traj.times, ys, colors[ci++ % 5]);
        }
        plot.write(svg);
    };

    if (system == "slow") {
        IntegrationConfig<SlowPoint> cfg;
        cfg.rel_tol = rtol;
        cfg.abs_tol = atol;
        cfg.max_time = tmax;
        cfg.store_dt = store_dt;
        const auto traj = integrate_slow(p, {S, SS}, cfg);
        write_trajectory_csv(out, traj, meta);
        render_svg(traj);
    } else {
        IntegrationConfig<ReducedState> cfg;
        cfg.rel_tol = rtol;
        cfg.abs_tol = atol;
        cfg.max_time = tmax;
        cfg.store_dt = store_dt;
        const ReducedState y0{S, I, SS, SI, II};
        if (y0.delta_violation(p) > kDeltaSlack)
            throw std::domain_error("initial state outside Delta");
        const auto traj = (system == "layer") ? integrate_layer(p, y0, cfg)
                                              : integrate_full_stiff(p, y0, cfg);
        write_trajectory_csv(out, traj, meta);
        render_svg(traj);
    }
    std::printf("wrote %s\n", out.c_str());
    return 0;
}

int run_singular(const ParamFlags& pf, double s0_init, double j1_width, int j1_samples,
                 bool shortcut, bool serial, const std::string& prefix) {
    const Params p = pf.params();
    if (r0(p) <= 1.0) throw std::domain_error("singular: requires R0 > 1");

    Metadata meta;
    meta.emplace_back("command", "singular");
    pf.describe(meta);
    meta.emplace_back("s0_init", std::to_string(s0_init));
    meta.emplace_back("j1_width", std::to_string(j1_width));
    meta.emplace_back("j1_samples", std::to_string(j1_samples));
    meta.emplace_back("parabola_shortcut", shortcut ? "true" : "false");

    CycleOptions copt;
    copt.parabola_shortcut = shortcut;
    const CycleCandidate cand = find_candidate_cycle(p, s0_init, copt);
    if (!cand.converged) {
        nlohmann::json j;
        j["version"] = kArtifactVersion;
        j["converged"] = false;
        j["note"] = cand.note;
        j["iterations"] = cand.iterations;
        j["last_S0"] = cand.S0;
        std::ofstream os(prefix + "_verdict.json");
        os << j.dump(2) << "\n";
        std::fprintf(stderr, "singular: candidate iteration diverged: %s\n", cand.note.c_str());
        return kRuntimeExit;
    }

    IntervalTestOptions opt;
    opt.width = j1_width;
    opt.samples = j1_samples;
    opt.policy = serial ? ExecPolicy::Serial : ExecPolicy::Parallel;
    opt.parabola_shortcut = shortcut;
    const IntervalImage im = interval_test(p, {cand.S0, cand.SS0}, opt);

    write_interval_csv(prefix + "_interval.csv", im, meta);
    write_interval_svg(prefix + "_interval.svg", im, p);
    nlohmann::json j;
    j["version"] = kArtifactVersion;
    for (const auto& [k, v] : meta) j["config"][k] = v;
    j["converged"] = true;
    j["candidate"] = {{"S0", cand.S0}, {"SS0", cand.SS0}, {"iterations", cand.iterations}};
    j["transversal"] = im.transversal();
    j["crossing_slope"] = im.crossing_slope;
    // entry-exit record of the slow piece through the candidate
    const EntryExitRecord rec = exit_time(pi1_fast({cand.S0, cand.SS0}, p), p);
    j["candidate_entry_exit"] = nlohmann::json::parse(entry_exit_json(rec));
    std::ofstream os(prefix + "_verdict.json");
    os << j.dump(2) << "\n";
    std::printf("candidate S0=%.8f transversal=%s\n", cand.S0,
                im.transversal() ? "true" : "false");
    return 0;
}

int run_hopf(const ParamFlags& pf, const std::string& axes, double x_lo, double x_hi,
             double y_lo, double y_hi, int res_x, int res_y, bool serial,
             const std::string& prefix) {
    auto parse_axis = [](const std::string& s) {
        if (s == "n") return Axis::N;
        if (s == "beta") return Axis::Beta;
        if (s == "epsilon" || s == "eps") return Axis::Epsilon;
        throw std::domain_error("unknown axis: " + s);
    };
    const auto comma = axes.find(',');
    if (comma == std::string::npos)
        throw std::domain_error("--axes must be '<x>,<y>' from {n, beta, epsilon}");
    const Axis ax = parse_axis(axes.substr(0, comma));
    const Axis ay = parse_axis(axes.substr(comma + 1));

    Metadata meta;
    meta.emplace_back("command", "hopf");
    pf.describe(meta);
    meta.emplace_back("axes", axes);
    meta.emplace_back("x_range", std::to_string(x_lo) + ":" + std::to_string(x_hi));
    meta.emplace_back("y_range", std::to_string(y_lo) + ":" + std::to_string(y_hi));
    meta.emplace_back("resolution", std::to_string(res_x) + "x" + std::to_string(res_y));

    SweepOptions opt;
    opt.policy = serial ? ExecPolicy::Serial : ExecPolicy::Parallel;
    const SweepGrid grid = sweep_slice(pf.params(), ax, x_lo, x_hi, res_x, ay, y_lo, y_hi,
                                       res_y, opt);
    write_sweep_csv(prefix + "_grid.csv", grid, meta);
    write_hopf_json(prefix + "_points.json", grid.boundary, meta);
    write_sweep_svg(prefix + "_boundary.svg", grid);
    std::printf("cells=%zu boundary=%zu failures=%d\n", grid.cells.size(),
                grid.boundary.size(), grid.failures);
    if (grid.failures > 0)
        std::fprintf(stderr, "hopf: %d cell(s) failed classification (see CSV)\n",
                     grid.failures);
    return 0;
}

int run_netsim(const ParamFlags& pf, int N, int replicas, double infected_frac,
               double tmax, double sample_dt, std::uint64_t seed, double peak_tol,
               bool serial, bool first_csv, const std::string& prefix) {
    const Params p = pf.params();
    EnsembleConfig cfg;
    cfg.N = N;
    cfg.degree = static_cast<int>(pf.n);
    if (std::fabs(pf.n - cfg.degree) > 0)
        throw std::domain_error("netsim: degree n must be an integer");
    cfg.replicas = replicas;
    cfg.infected_fraction = infected_frac;
    cfg.t_max = tmax;
    cfg.sample_dt = sample_dt;
    cfg.root_seed = seed;
    cfg.policy = serial ? ExecPolicy::Serial : ExecPolicy::Parallel;

    Metadata meta;
    meta.emplace_back("command", "netsim");
    pf.describe(meta);
    meta.emplace_back("N", std::to_string(N));
    meta.emplace_back("replicas", std::to_string(replicas));
    meta.emplace_back("infected_fraction", std::to_string(infected_frac));
    meta.emplace_back("tmax", std::to_string(tmax));
    meta.emplace_back("sample_dt", std::to_string(sample_dt));
    meta.emplace_back("seed", std::to_string(seed));

    const NormalizedRecord rec = run_ensemble(p, cfg);
    write_ensemble_json(prefix + "_ensemble.json", rec, meta);

    if (first_csv) {
        Rng pick = Rng::stream(seed, 0);
        const std::uint64_t graph_seed = pick.next_u64();
        const std::uint64_t run_seed = pick.next_u64();
        const RegularGraph g = generate_regular_graph(N, cfg.degree, graph_seed);
        std::vector<std::int32_t> all(N);
        for (int v = 0; v < N; ++v) all[v] = v;
        const int n_inf = std::max(1, static_cast<int>(std::lround(infected_frac * N)));
        for (int k = 0; k < n_inf; ++k) std::swap(all[k], all[k + pick.below(N - k)]);
        all.resize(n_inf);
        write_sim_csv(prefix + "_replica0.csv",
                      gillespie_run(g, p, all, tmax, sample_dt, run_seed), meta);
    }

    const OdeComparison cmp = compare_to_ode(rec, p);
    const AttractorReport probe = probe_periodicity(rec, p);
    nlohmann::json j;
    j["version"] = kArtifactVersion;
    for (const auto& [k, v] : meta) j["config"][k] = v;
    j["sup_norm"] = {{"S", cmp.sup_norm[0]},
                     {"I", cmp.sup_norm[1]},
                     {"SS", cmp.sup_norm[2]},
                     {"SI", cmp.sup_norm[3]},
                     {"II", cmp.sup_norm[4]}};
    j["peak_time_sim"] = cmp.peak_time_sim;
    j["peak_time_ode"] = cmp.peak_time_ode;
    j["peak_timing_rel_err"] = cmp.peak_timing_rel_err;
    j["peak_timing_tolerance"] = peak_tol;
    j["peak_timing_within_tolerance"] = cmp.peak_timing_rel_err <= peak_tol;
    j["periodicity_probe"] = {{"kind", attractor_name(probe.kind)},
                              {"period", probe.period},
                              {"amplitude", probe.amplitude},
                              {"caveat", probe.note}};
    std::ofstream os(prefix + "_compare.json");
    os << j.dump(2) << "\n";
    std::printf("peak timing: sim=%.4f ode=%.4f rel_err=%.4f\n", cmp.peak_time_sim,
                cmp.peak_time_ode, cmp.peak_timing_rel_err);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"pair-approximation SIRS fast-slow analysis"};
    app.set_config("--config", "", "read options from a TOML/INI file");
    app.require_subcommand(1);

    // integrate
    auto* ci = app.add_subcommand("integrate", "integrate the full, layer or slow system");
    ParamFlags pfi;
    pfi.attach(ci);
    std::string system;
    double S = 1.0, I = 0.0, SS = -1.0, SI = 0.0, II = 0.0;
    double tmax = 100.0, rtol = 1e-9, atol = 1e-11, store_dt = 0.0;
    std::string out = "trajectory.csv", svg, plot_components = "I";
    ci->add_option("--system", system, "full | layer | slow")
        ->required()
        ->check(CLI::IsMember({"full", "layer", "slow"}));
    ci->add_option("--S", S, "initial S")->required();
    ci->add_option("--I", I, "initial I");
    ci->add_option("--SS", SS, "initial SS (default n S^2)");
    ci->add_option("--SI", SI, "initial SI");
    ci->add_option("--II", II, "initial II");
    ci->add_option("--tmax", tmax, "integration horizon");
    ci->add_option("--rtol", rtol, "relative tolerance");
    ci->add_option("--atol", atol, "absolute tolerance");
    ci->add_option("--store-dt", store_dt, "dense output grid (0 = solver steps)");
    ci->add_option("--out", out, "output CSV path");
    ci->add_option("--svg", svg, "optional SVG line plot path");
    ci->add_option("--plot-components", plot_components, "comma list for the SVG");

    // singular
    auto* cs = app.add_subcommand("singular", "candidate cycle + J1/J2/J3 interval test");
    ParamFlags pfs;
    pfs.attach(cs);
    double s0_init = 0.9, j1_width = 1e-2;
    int j1_samples = 21;
    bool serial_s = false, shortcut_s = false;
    std::string prefix_s = "singular";
    cs->add_option("--s0-init", s0_init, "iteration start S0");
    cs->add_option("--j1-width", j1_width, "J1 width in SS");
    cs->add_option("--j1-samples", j1_samples, "J1 sample count");
    cs->add_flag("--parabola-shortcut", shortcut_s,
                 "map entries with the on-parabola h-map (good for large n)");
    cs->add_flag("--serial", serial_s, "disable the parallel sample map");
    cs->add_option("--out-prefix", prefix_s, "output file prefix");

    // hopf
    auto* ch = app.add_subcommand("hopf", "classify a parameter slice and trace the Hopf boundary");
    ParamFlags pfh;
    pfh.attach(ch);
    std::string axes = "beta,n";
    double x_lo = 0.0, x_hi = 15.0, y_lo = 2.1, y_hi = 6.0;
    int res_x = 100, res_y = 100;
    bool serial_h = false;
    std::string prefix_h = "hopf";
    ch->add_option("--axes", axes, "two of {n, beta, epsilon}, e.g. beta,n");
    ch->add_option("--x-lo", x_lo);
    ch->add_option("--x-hi", x_hi);
    ch->add_option("--y-lo", y_lo);
    ch->add_option("--y-hi", y_hi);
    ch->add_option("--res-x", res_x, "grid resolution along x");
    ch->add_option("--res-y", res_y, "grid resolution along y");
    ch->add_flag("--serial", serial_h, "disable the parallel cell map");
    ch->add_option("--out-prefix", prefix_h, "output file prefix");

    // netsim
    auto* cn = app.add_subcommand("netsim", "stochastic runs on random regular graphs");
    ParamFlags pfn;
    pfn.attach(cn);
    int N = 10000, replicas = 50;
    double infected_frac = 0.01, tmax_n = 10.0, sample_dt = 0.02, peak_tol = 0.15;
    std::uint64_t seed = 1;
    bool serial_n = false, first_csv = false;
    std::string prefix_n = "netsim";
    cn->add_option("--N", N, "node count");
    cn->add_option("--replicas", replicas);
    cn->add_option("--infected-frac", infected_frac, "initially infected fraction");
    cn->add_option("--tmax", tmax_n);
    cn->add_option("--sample-dt", sample_dt);
    cn->add_option("--seed", seed, "root seed (replicas derive their own streams)");
    cn->add_option("--peak-tol", peak_tol, "peak-timing tolerance for the report");
    cn->add_flag("--serial", serial_n, "run replicas serially");
    cn->add_flag("--replica-csv", first_csv, "also write replica 0 as CSV");
    cn->add_option("--out-prefix", prefix_n, "output file prefix");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        app.exit(e);  // prints help/usage message
        return e.get_exit_code() == 0 ? 0 : kUsageExit;
    }

    try {
        if (*ci) {
            if (SS < 0.0) SS = pfi.n * S * S;
            return run_integrate(pfi, system, S, I, SS, SI, II, tmax, rtol, atol,
                                 store_dt, out, svg, plot_components);
        }
        if (*cs) return run_singular(pfs, s0_init, j1_width, j1_samples, shortcut_s,
                                     serial_s, prefix_s);
        if (*ch) return run_hopf(pfh, axes, x_lo, x_hi, y_lo, y_hi, res_x, res_y,
                                 serial_h, prefix_h);
        if (*cn) return run_netsim(pfn, N, replicas, infected_frac, tmax_n, sample_dt,
                                   seed, peak_tol, serial_n, first_csv, prefix_n);
    } catch (const std::domain_error& e) {
        std::fprintf(stderr, "precondition error: %s\n", e.what());
        return kUsageExit;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kRuntimeExit;
    }
    return 0;
}
