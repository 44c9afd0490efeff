#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "pairsirs/exec.hpp"
#include "pairsirs/io.hpp"
#include "pairsirs/params.hpp"
#include "pairsirs/state.hpp"

namespace pairsirs {

using Spectrum5 = std::array<std::complex<double>, 5>;

/// Central finite-difference Jacobian of a generic R^m -> R^m field,
/// step 1e-6 * max(1, |x_j|).
std::vector<double> fd_jacobian(const std::function<std::vector<double>(const std::vector<double>&)>& f,
                                const std::vector<double>& x);

/// Eigenvalues of a dense m x m matrix (row-major), sorted by descending
/// real part, ties by descending imaginary part.
std::vector<std::complex<double>> dense_eigenvalues(const std::vector<double>& a, int m);

/// Newton-refined zero of reduced_rhs seeded by the first-order series.
/// Residual at the returned point is <= 1e-12 (sup norm).
ReducedState refine_equilibrium(const Params& p, double tol = 1e-12, int max_iter = 50);

/// Eigenvalues of the FD Jacobian of reduced_rhs at `state`.
Spectrum5 jacobian_spectrum(const ReducedState& state, const Params& p);

enum class Axis { N, Beta, Epsilon };
const char* axis_name(Axis a);
void set_axis(Params& p, Axis a, double value);
double get_axis(const Params& p, Axis a);

enum class StabilityClass { StableEquilibrium, CycleSide, Failed };

struct Classification {
    StabilityClass cls = StabilityClass::Failed;
    Spectrum5 spectrum{};            // valid when an endemic equilibrium exists
    std::complex<double> leading{};  // leading non-real eigenvalue (Im > 0)
    bool has_pair = false;
    std::string error;
};

/// Endemic-equilibrium spectrum classification of one parameter point.
/// Points with R0 <= 1 classify as stable (disease dies out, no cycles).
Classification classify_equilibrium(const Params& p);

struct HopfPoint {
    double n = 0.0, beta = 0.0, epsilon = 0.0;
    std::complex<double> critical_pair{};  // member with Im > 0
    double frequency = 0.0;                // imaginary part at the crossing
    Axis axis = Axis::Beta;                // bisected axis
};

/// Bisection on the real part of the tracked non-real pair along one axis,
/// to 1e-6 in the parameter. Returns nothing when the endpoint
/// classifications agree (no sign change).
std::optional<HopfPoint> hopf_bisect(const Params& base, Axis axis, double lo, double hi,
                                     double param_tol = 1e-6);

struct SweepCell {
    double x = 0.0, y = 0.0;
    StabilityClass cls = StabilityClass::Failed;
    std::complex<double> leading{};
    bool has_pair = false;
    std::string error;
};

struct SweepGrid {
    Axis ax_x = Axis::Beta, ax_y = Axis::N, ax_fixed = Axis::Epsilon;
    double fixed_value = 0.0;
    std::vector<double> xs, ys;      // grid coordinates
    std::vector<SweepCell> cells;    // row-major: cells[j * xs.size() + i]
    std::vector<HopfPoint> boundary; // refined points between differing cells
    int failures = 0;

    const SweepCell& at(std::size_t i, std::size_t j) const { return cells[j * xs.size() + i]; }
};

struct SweepOptions {
    ExecPolicy policy = ExecPolicy::Parallel;
    bool refine_boundary = true;
};

/// Classifies a 2-D parameter grid and extracts the Hopf boundary by
/// bisecting between adjacent cells of differing class. Cell failures are
/// recorded and the sweep continues.
SweepGrid sweep_slice(const Params& base, Axis ax_x, double x_lo, double x_hi, int nx,
                      Axis ax_y, double y_lo, double y_hi, int ny,
                      const SweepOptions& opt = {});

void write_sweep_csv(const std::string& path, const SweepGrid& grid, const Metadata& meta);
void write_hopf_json(const std::string& path, const std::vector<HopfPoint>& points,
                     const Metadata& meta);
void write_sweep_svg(const std::string& path, const SweepGrid& grid);

/// Largest eps with a Hopf point at degree n over a beta grid (bisection in
/// eps per beta, tolerance eps_tol). Returns 0 when no beta is ever unstable.
double largest_hopf_eps(const Params& base, double n, const std::vector<double>& betas,
                        double eps_lo = 1e-3, double eps_hi = 1.0, double eps_tol = 1e-3,
                        ExecPolicy policy = ExecPolicy::Parallel);

} // namespace pairsirs
