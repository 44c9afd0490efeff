#include "pairsirs/netsim.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <nlohmann/json.hpp>
#include <unordered_set>

#include "pairsirs/errors.hpp"
#include "pairsirs/integrate.hpp"
#include "pairsirs/model.hpp"
#include "pairsirs/rng.hpp"

namespace pairsirs {

const std::array<const char*, 3>& SimRecord::node_names() {
    static const std::array<const char*, 3> v{"S", "I", "R"};
    return v;
}
const std::array<const char*, 6>& SimRecord::edge_names() {
    static const std::array<const char*, 6> v{"SS", "SI", "SR", "II", "IR", "RR"};
    return v;
}

RegularGraph generate_regular_graph(int N, int n, std::uint64_t seed, int max_retries) {
    if (n < 1 || N <= n) throw std::domain_error("generate_regular_graph: need N > n >= 1");
    if ((static_cast<std::int64_t>(N) * n) % 2 != 0)
        throw std::domain_error("generate_regular_graph: N * n must be even");

    Rng rng(seed);
    const int M = N * n / 2;
    std::vector<std::int32_t> stubs(static_cast<std::size_t>(N) * n);

    for (int attempt = 0; attempt < max_retries; ++attempt) {
        for (int v = 0; v < N; ++v)
            for (int k = 0; k < n; ++k) stubs[static_cast<std::size_t>(v) * n + k] = v;
        // Fisher-Yates
        for (std::size_t i = stubs.size() - 1; i > 0; --i)
            std::swap(stubs[i], stubs[rng.below(i + 1)]);

        std::unordered_set<std::int64_t> seen;
        seen.reserve(static_cast<std::size_t>(M) * 2);
        std::vector<std::array<std::int32_t, 2>> edges;
        edges.reserve(M);
        bool simple = true;
        for (int e = 0; e < M; ++e) {
            const std::int32_t u = stubs[2 * e], v = stubs[2 * e + 1];
            if (u == v) { simple = false; break; }
            const std::int64_t key = static_cast<std::int64_t>(std::min(u, v)) * N + std::max(u, v);
            if (!seen.insert(key).second) { simple = false; break; }
            edges.push_back({u, v});
        }
        if (!simple) continue;

        RegularGraph g;
        g.N = N;
        g.degree = n;
        g.edges = std::move(edges);
        g.adj.assign(static_cast<std::size_t>(N) * n, -1);
        g.incident.assign(static_cast<std::size_t>(N) * n, -1);
        std::vector<int> fill(N, 0);
        for (int e = 0; e < M; ++e) {
            const auto [u, v] = g.edges[e];
            g.adj[static_cast<std::size_t>(u) * n + fill[u]] = v;
            g.incident[static_cast<std::size_t>(u) * n + fill[u]++] = e;
            g.adj[static_cast<std::size_t>(v) * n + fill[v]] = u;
            g.incident[static_cast<std::size_t>(v) * n + fill[v]++] = e;
        }

        // connectivity by BFS
        std::vector<char> vis(N, 0);
        std::vector<std::int32_t> queue{0};
        vis[0] = 1;
        std::size_t head = 0;
        int reached = 1;
        while (head < queue.size()) {
            const std::int32_t v = queue[head++];
            for (int k = 0; k < n; ++k) {
                const std::int32_t w = g.neighbor(v, k);
                if (!vis[w]) {
                    vis[w] = 1;
                    queue.push_back(w);
                    ++reached;
                }
            }
        }
        if (reached == N) return g;
    }
    throw GenerationError("generate_regular_graph: retry budget exhausted");
}

namespace {

// unordered pair-type index: SS=0 SI=1 SR=2 II=3 IR=4 RR=5
inline int pair_type(int a, int b) {
    if (a > b) std::swap(a, b);
    static constexpr int table[3][3] = {{0, 1, 2}, {-1, 3, 4}, {-1, -1, 5}};
    return table[a][b];
}

/// Swap-pop indexable set of edge ids with O(1) insert, remove, sample.
class EdgeSet {
public:
    explicit EdgeSet(int total_edges) : pos_(total_edges, -1) {}
    void insert(std::int32_t e) {
        if (pos_[e] >= 0) return;
        pos_[e] = static_cast<std::int32_t>(items_.size());
        items_.push_back(e);
    }
    void remove(std::int32_t e) {
        const std::int32_t i = pos_[e];
        if (i < 0) return;
        const std::int32_t last = items_.back();
        items_[i] = last;
        pos_[last] = i;
        items_.pop_back();
        pos_[e] = -1;
    }
    bool contains(std::int32_t e) const { return pos_[e] >= 0; }
    std::size_t size() const { return items_.size(); }
    std::int32_t at(std::size_t i) const { return items_[i]; }

private:
    std::vector<std::int32_t> items_;
    std::vector<std::int32_t> pos_;
};

/// Swap-pop indexable set of node ids.
class NodeSet {
public:
    explicit NodeSet(int N) : pos_(N, -1) {}
    void insert(std::int32_t v) {
        if (pos_[v] >= 0) return;
        pos_[v] = static_cast<std::int32_t>(items_.size());
        items_.push_back(v);
    }
    void remove(std::int32_t v) {
        const std::int32_t i = pos_[v];
        if (i < 0) return;
        const std::int32_t last = items_.back();
        items_[i] = last;
        pos_[last] = i;
        items_.pop_back();
        pos_[v] = -1;
    }
    std::size_t size() const { return items_.size(); }
    std::int32_t at(std::size_t i) const { return items_[i]; }

private:
    std::vector<std::int32_t> items_;
    std::vector<std::int32_t> pos_;
};

} // namespace

SimRecord gillespie_run(const RegularGraph& g, const Params& p,
                        const std::vector<std::int32_t>& initial_infected, double t_max,
                        double sample_dt, std::uint64_t seed) {
    p.validate();
    if (!(t_max > 0.0) || !(sample_dt > 0.0))
        throw std::domain_error("gillespie_run: need t_max > 0 and sample_dt > 0");

    const int N = g.N, n = g.degree;
    std::vector<std::uint8_t> state(N, 0);  // 0=S 1=I 2=R
    for (const auto v : initial_infected) {
        if (v < 0 || v >= N) throw std::domain_error("gillespie_run: infected node out of range");
        state[v] = 1;
    }

    std::array<std::int64_t, 3> nodes{};
    for (int v = 0; v < N; ++v) ++nodes[state[v]];

    std::array<std::int64_t, 6> unordered{};  // per unordered pair type
    for (const auto& e : g.edges) ++unordered[pair_type(state[e[0]], state[e[1]])];

    EdgeSet si(static_cast<int>(g.edges.size()));
    for (std::int32_t e = 0; e < static_cast<std::int32_t>(g.edges.size()); ++e)
        if (pair_type(state[g.edges[e][0]], state[g.edges[e][1]]) == 1) si.insert(e);
    NodeSet inf(N), rec(N);
    for (int v = 0; v < N; ++v) {
        if (state[v] == 1) inf.insert(v);
        if (state[v] == 2) rec.insert(v);
    }

    SimRecord out;
    out.seed = seed;
    out.N = N;
    out.degree = n;
    const std::size_t n_samples = static_cast<std::size_t>(std::floor(t_max / sample_dt)) + 1;

    auto record = [&](double t) {
        out.times.push_back(t);
        out.nodes.push_back(nodes);
        // reported convention: within-state counts doubled
        out.edges.push_back({2 * unordered[0], unordered[1], unordered[2],
                             2 * unordered[3], unordered[4], 2 * unordered[5]});
    };

    auto set_state = [&](std::int32_t v, std::uint8_t to) {
        const std::uint8_t from = state[v];
        --nodes[from];
        ++nodes[to];
        if (from == 1) inf.remove(v); else if (from == 2) rec.remove(v);
        if (to == 1) inf.insert(v); else if (to == 2) rec.insert(v);
        state[v] = to;
        for (int k = 0; k < n; ++k) {
            const std::int32_t w = g.neighbor(v, k);
            const std::int32_t e = g.incident_edge(v, k);
            const int told = pair_type(from, state[w]);
            const int tnew = pair_type(to, state[w]);
            --unordered[told];
            ++unordered[tnew];
            if (told == 1) si.remove(e);
            if (tnew == 1) si.insert(e);
        }
    };

    Rng rng(seed);
    double t = 0.0;
    std::size_t next_sample = 0;

    while (next_sample < n_samples) {
        const double r_inf = p.beta * static_cast<double>(si.size());
        const double r_rec = p.gamma * static_cast<double>(inf.size());
        const double r_wane = p.epsilon * static_cast<double>(rec.size());
        const double total = r_inf + r_rec + r_wane;
        double t_next = (total > 0.0) ? t + rng.exponential(total) : t_max + sample_dt;

        while (next_sample < n_samples &&
               static_cast<double>(next_sample) * sample_dt <= std::min(t_next, t_max)) {
            record(static_cast<double>(next_sample) * sample_dt);
            ++next_sample;
        }
        if (total == 0.0 || t_next > t_max) break;
        t = t_next;

        const double u = rng.uniform() * total;
        if (u < r_inf) {
            const std::int32_t e = si.at(rng.below(si.size()));
            const auto [a, b] = g.edges[e];
            set_state(state[a] == 0 ? a : b, 1);
        } else if (u < r_inf + r_rec) {
            set_state(inf.at(rng.below(inf.size())), 2);
        } else {
            set_state(rec.at(rng.below(rec.size())), 0);
        }
    }
    while (next_sample < n_samples) {
        record(static_cast<double>(next_sample) * sample_dt);
        ++next_sample;
    }
    out.final_states = state;
    return out;
}

void write_sim_csv(const std::string& path, const SimRecord& rec, const Metadata& meta) {
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << metadata_comment_block(meta);
    os << "t";
    for (auto* s : SimRecord::node_names()) os << "," << s;
    for (auto* s : SimRecord::edge_names()) os << "," << s;
    os << "\n";
    os.precision(17);
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        os << rec.times[k];
        for (const auto v : rec.nodes[k]) os << "," << v;
        for (const auto v : rec.edges[k]) os << "," << v;
        os << "\n";
    }
}

NormalizedRecord run_ensemble(const Params& p, const EnsembleConfig& cfg) {
    p.validate();
    if (cfg.replicas < 1) throw std::domain_error("run_ensemble: need at least one replica");
    if (cfg.degree < 1 || cfg.N <= cfg.degree)
        throw std::domain_error("run_ensemble: need N > degree >= 1");
    if ((static_cast<std::int64_t>(cfg.N) * cfg.degree) % 2 != 0)
        throw std::domain_error("run_ensemble: N * degree must be even");
    if (cfg.infected_fraction < 0.0 || cfg.infected_fraction > 1.0)
        throw std::domain_error("run_ensemble: infected_fraction must lie in [0, 1]");
    int n_inf = static_cast<int>(std::lround(cfg.infected_fraction * cfg.N));
    if (cfg.infected_fraction > 0.0 && n_inf == 0) n_inf = 1;

    // exceptions must not unwind out of the parallel region
    std::vector<SimRecord> recs(cfg.replicas);
    std::vector<std::string> errors(cfg.replicas);
    parallel_for(cfg.policy, cfg.replicas, [&](std::ptrdiff_t r) {
        try {
            Rng pick = Rng::stream(cfg.root_seed, 2 * static_cast<std::uint64_t>(r));
            const std::uint64_t graph_seed = pick.next_u64();
            const std::uint64_t run_seed = pick.next_u64();
            const RegularGraph g = generate_regular_graph(cfg.N, cfg.degree, graph_seed);
            // sample n_inf distinct nodes
            std::vector<std::int32_t> all(cfg.N);
            for (int v = 0; v < cfg.N; ++v) all[v] = v;
            for (int k = 0; k < n_inf; ++k)
                std::swap(all[k], all[k + pick.below(cfg.N - k)]);
            all.resize(n_inf);
            recs[r] = gillespie_run(g, p, all, cfg.t_max, cfg.sample_dt, run_seed);
        } catch (const std::exception& e) {
            errors[r] = e.what();
        }
    });
    for (const auto& e : errors)
        if (!e.empty()) throw GenerationError("run_ensemble: replica failed: " + e);

    NormalizedRecord out;
    out.replicas = cfg.replicas;
    out.N = cfg.N;
    out.degree = cfg.degree;
    out.times = recs[0].times;
    const std::size_t T = out.times.size();
    out.mean.assign(T, {});
    out.i_quantiles.assign(T, {});
    std::vector<double> ivals(cfg.replicas);
    for (std::size_t k = 0; k < T; ++k) {
        for (int r = 0; r < cfg.replicas; ++r) {
            const auto& nd = recs[r].nodes[k];
            const auto& ed = recs[r].edges[k];
            for (int c = 0; c < 3; ++c) out.mean[k][c] += static_cast<double>(nd[c]);
            for (int c = 0; c < 6; ++c) out.mean[k][3 + c] += static_cast<double>(ed[c]);
            ivals[r] = static_cast<double>(nd[1]) / cfg.N;
        }
        for (auto& v : out.mean[k]) v /= static_cast<double>(cfg.replicas) * cfg.N;
        std::sort(ivals.begin(), ivals.end());
        auto q = [&](double f) {
            const double pos = f * (cfg.replicas - 1);
            const std::size_t i = static_cast<std::size_t>(pos);
            const double w = pos - static_cast<double>(i);
            return (i + 1 < ivals.size()) ? (1.0 - w) * ivals[i] + w * ivals[i + 1] : ivals[i];
        };
        out.i_quantiles[k] = {q(0.1), q(0.5), q(0.9)};
    }
    return out;
}

void write_ensemble_json(const std::string& path, const NormalizedRecord& rec,
                         const Metadata& meta) {
    nlohmann::json j;
    j["version"] = kArtifactVersion;
    for (const auto& [k, v] : meta) j["config"][k] = v;
    j["replicas"] = rec.replicas;
    j["N"] = rec.N;
    j["degree"] = rec.degree;
    j["times"] = rec.times;
    static const char* comp[9] = {"S", "I", "R", "SS", "SI", "SR", "II", "IR", "RR"};
    for (int c = 0; c < 9; ++c) {
        std::vector<double> col(rec.times.size());
        for (std::size_t k = 0; k < rec.times.size(); ++k) col[k] = rec.mean[k][c];
        j["mean"][comp[c]] = col;
    }
    static const char* qn[3] = {"q10", "q50", "q90"};
    for (int c = 0; c < 3; ++c) {
        std::vector<double> col(rec.times.size());
        for (std::size_t k = 0; k < rec.times.size(); ++k) col[k] = rec.i_quantiles[k][c];
        j["I_quantiles"][qn[c]] = col;
    }
    std::ofstream os(path);
    if (!os) throw std::runtime_error("cannot open " + path);
    os << j.dump(2) << "\n";
}

namespace {

ReducedState record_start(const NormalizedRecord& rec) {
    // mean columns: S I R SS SI SR II IR RR
    const auto& m = rec.mean.front();
    return {m[0], m[1], m[3], m[4], m[6]};
}

double peak_time(const std::vector<double>& times, const std::vector<double>& vals) {
    std::size_t best = 0;
    for (std::size_t k = 1; k < vals.size(); ++k)
        if (vals[k] > vals[best]) best = k;
    return times[best];
}

} // namespace

OdeComparison compare_to_ode(const NormalizedRecord& rec, const Params& p,
                             std::optional<ReducedState> initial) {
    if (rec.times.size() < 2) throw std::domain_error("compare_to_ode: record too short");
    const ReducedState start = record_start(rec);
    if (initial) {
        for (std::size_t i = 0; i < ReducedState::size(); ++i)
            if (std::fabs((*initial)[i] - start[i]) > 1e-6)
                throw std::domain_error("compare_to_ode: mismatched initial conditions");
    }

    IntegrationConfig<ReducedState> cfg;
    cfg.max_time = rec.times.back();
    cfg.store_dt = rec.times[1] - rec.times[0];
    const auto traj = integrate_reduced(p, start, cfg);

    OdeComparison cmp;
    std::vector<double> sim_I(rec.times.size()), ode_I;
    const std::size_t T = std::min(traj.times.size(), rec.times.size());
    ode_I.resize(T);
    for (std::size_t k = 0; k < T; ++k) {
        const auto& m = rec.mean[k];
        const ReducedState sim{m[0], m[1], m[3], m[4], m[6]};
        sim_I[k] = m[1];
        ode_I[k] = traj.states[k].I;
        for (std::size_t i = 0; i < 5; ++i)
            cmp.sup_norm[i] = std::fmax(cmp.sup_norm[i], std::fabs(sim[i] - traj.states[k][i]));
    }
    cmp.peak_time_sim = peak_time(rec.times, sim_I);
    cmp.peak_time_ode = peak_time(traj.times, ode_I);
    cmp.peak_timing_rel_err =
        std::fabs(cmp.peak_time_sim - cmp.peak_time_ode) / std::fmax(cmp.peak_time_ode, 1e-12);
    return cmp;
}

AttractorReport probe_periodicity(const NormalizedRecord& rec, const Params& p,
                                  int smooth_window) {
    // moving-average smoothing, then reuse the deterministic classifier
    Trajectory<ReducedState> traj;
    traj.regime = Regime::Full;
    const int w = std::max(1, smooth_window);
    for (std::size_t k = 0; k < rec.times.size(); ++k) {
        const std::size_t lo = (k >= static_cast<std::size_t>(w)) ? k - w : 0;
        const std::size_t hi = std::min(rec.times.size() - 1, k + static_cast<std::size_t>(w));
        std::array<double, 9> acc{};
        for (std::size_t j = lo; j <= hi; ++j)
            for (int c = 0; c < 9; ++c) acc[c] += rec.mean[j][c];
        const double cnt = static_cast<double>(hi - lo + 1);
        traj.times.push_back(rec.times[k]);
        traj.states.push_back({acc[0] / cnt, acc[1] / cnt, acc[3] / cnt, acc[4] / cnt, acc[6] / cnt});
    }
    AttractorReport rep = detect_attractor(traj, p);
    rep.note = "stochastic best-effort probe (smoothed ensemble mean)" +
               (rep.note.empty() ? "" : "; " + rep.note);
    return rep;
}

} // namespace pairsirs
