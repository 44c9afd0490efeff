#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pairsirs/exec.hpp"
#include "pairsirs/io.hpp"
#include "pairsirs/params.hpp"
#include "pairsirs/singular_orbit.hpp"
#include "pairsirs/state.hpp"

namespace pairsirs {

/// Simple connected n-regular graph on N nodes.
struct RegularGraph {
    int N = 0;
    int degree = 0;
    std::vector<std::int32_t> adj;       // flat N x degree neighbor lists
    std::vector<std::int32_t> incident;  // flat N x degree edge ids
    std::vector<std::array<std::int32_t, 2>> edges;

    std::int32_t neighbor(int v, int k) const { return adj[static_cast<std::size_t>(v) * degree + k]; }
    std::int32_t incident_edge(int v, int k) const {
        return incident[static_cast<std::size_t>(v) * degree + k];
    }
};

/// Configuration-model pairing with rejection of self-loops and multi-edges,
/// retried until the graph is simple and connected. Requires N * n even and
/// N > n; throws GenerationError after 1e4 failed retries.
RegularGraph generate_regular_graph(int N, int n, std::uint64_t seed, int max_retries = 10000);

/// Raw (unnormalized) sampled counts from one stochastic run. Node counts sum
/// to N; edge counts follow the double-counting convention ([SS], [II], [RR]
/// count both directions, so they are even) and satisfy the edge-sum
/// identities exactly at every sample.
struct SimRecord {
    std::vector<double> times;
    std::vector<std::array<std::int64_t, 3>> nodes;  // S, I, R
    std::vector<std::array<std::int64_t, 6>> edges;  // SS, SI, SR, II, IR, RR
    std::vector<std::uint8_t> final_states;          // per-node state at the end (0/1/2)
    std::uint64_t seed = 0;
    int N = 0;
    int degree = 0;

    static const std::array<const char*, 3>& node_names();
    static const std::array<const char*, 6>& edge_names();
};

/// Exact aggregate-rate Gillespie simulation: each SI edge fires infection at
/// rate beta, each I node recovers at rate gamma, each R node wanes at rate
/// epsilon. Edge counts are maintained incrementally.
SimRecord gillespie_run(const RegularGraph& g, const Params& p,
                        const std::vector<std::int32_t>& initial_infected, double t_max,
                        double sample_dt, std::uint64_t seed);

void write_sim_csv(const std::string& path, const SimRecord& rec, const Metadata& meta);

/// Ensemble-mean normalized trajectory (all counts divided by N).
struct NormalizedRecord {
    std::vector<double> times;
    std::vector<std::array<double, 9>> mean;          // S I R SS SI SR II IR RR
    std::vector<std::array<double, 3>> i_quantiles;   // q10, q50, q90 of I
    int replicas = 0;
    int N = 0;
    int degree = 0;
};

struct EnsembleConfig {
    int N = 10000;
    int degree = 4;
    int replicas = 50;
    double infected_fraction = 0.01;
    double t_max = 10.0;
    double sample_dt = 0.02;
    std::uint64_t root_seed = 1;
    ExecPolicy policy = ExecPolicy::Parallel;
};

/// Independent replicas (fresh graph and infected set per replica) with
/// per-replica RNG streams derived from the root seed; results do not depend
/// on the thread count.
NormalizedRecord run_ensemble(const Params& p, const EnsembleConfig& cfg);

void write_ensemble_json(const std::string& path, const NormalizedRecord& rec,
                         const Metadata& meta);

struct OdeComparison {
    std::array<double, 5> sup_norm{};  // per reduced component S I SS SI II
    double peak_time_sim = 0.0;
    double peak_time_ode = 0.0;
    double peak_timing_rel_err = 0.0;
};

/// Sup-norm distance between the normalized ensemble mean and the reduced-ODE
/// solution from matched initial conditions. An explicitly supplied initial
/// condition must match the record's first sample.
OdeComparison compare_to_ode(const NormalizedRecord& rec, const Params& p,
                             std::optional<ReducedState> initial = std::nullopt);

/// Best-effort stochastic periodicity probe: detect_attractor's peak criteria
/// applied to the smoothed ensemble-mean I. Reported with a caveat note.
AttractorReport probe_periodicity(const NormalizedRecord& rec, const Params& p,
                                  int smooth_window = 5);

} // namespace pairsirs
