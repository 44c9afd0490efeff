#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pairsirs/params.hpp"

namespace pairsirs {

/// All 8 node/edge densities of the unreduced system.
/// Order fixed for CSV export: S, I, SS, SI, SR, II, IR, RR.
struct FullState {
    double S = 1, I = 0, SS = 0, SI = 0, SR = 0, II = 0, IR = 0, RR = 0;

    static constexpr std::size_t size() { return 8; }
    static const std::array<const char*, 8>& names() {
        static const std::array<const char*, 8> v{"S", "I", "SS", "SI", "SR", "II", "IR", "RR"};
        return v;
    }
    double& operator[](std::size_t i) { return (&S)[i]; }
    double operator[](std::size_t i) const { return (&S)[i]; }

    bool finite() const {
        for (std::size_t i = 0; i < 8; ++i)
            if (!std::isfinite((*this)[i])) return false;
        return true;
    }

    /// Residuals of the three edge-sum constraints
    ///   SS+SI+SR - nS,  SI+II+IR - nI,  SR+IR+RR - n(1-S-I).
    std::array<double, 3> constraint_residuals(const Params& p) const {
        return {SS + SI + SR - p.n * S,
                SI + II + IR - p.n * I,
                SR + IR + RR - p.n * (1.0 - S - I)};
    }
};

/// The five retained coordinates of the reduced system: S, I, SS, SI, II.
struct ReducedState {
    double S = 1, I = 0, SS = 0, SI = 0, II = 0;

    static constexpr std::size_t size() { return 5; }
    static const std::array<const char*, 5>& names() {
        static const std::array<const char*, 5> v{"S", "I", "SS", "SI", "II"};
        return v;
    }
    double& operator[](std::size_t i) { return (&S)[i]; }
    double operator[](std::size_t i) const { return (&S)[i]; }

    bool finite() const {
        for (std::size_t i = 0; i < 5; ++i)
            if (!std::isfinite((*this)[i])) return false;
        return true;
    }

    /// Signed violation of the well-posedness set Delta:
    /// componentwise >= 0, S+I <= 1, 0 <= SS+SI <= nS, 0 <= SI+II <= nI.
    /// Returns 0 when inside, otherwise the largest constraint violation.
    double delta_violation(const Params& p) const {
        double v = 0.0;
        for (std::size_t i = 0; i < 5; ++i) v = std::fmax(v, -(*this)[i]);
        v = std::fmax(v, S + I - 1.0);
        v = std::fmax(v, SS + SI - p.n * S);
        v = std::fmax(v, SI + II - p.n * I);
        return v;
    }
    bool in_delta(const Params& p, double tol = 0.0) const {
        return finite() && delta_violation(p) <= tol;
    }

    /// Completion to the full state via the edge-sum constraints; SR, IR, RR
    /// are always recomputed, never integrated.
    FullState complete(const Params& p) const {
        FullState f;
        f.S = S; f.I = I; f.SS = SS; f.SI = SI; f.II = II;
        f.SR = p.n * S - SS - SI;
        f.IR = p.n * I - SI - II;
        f.RR = p.n * (1.0 - S - I) - f.SR - f.IR;
        return f;
    }
};

inline ReducedState project(const FullState& f) {
    return {f.S, f.I, f.SS, f.SI, f.II};
}

/// A point (S, SS) on the critical manifold C0 = {I = SI = II = 0}.
struct SlowPoint {
    double S = 0, SS = 0;

    static constexpr std::size_t size() { return 2; }
    static const std::array<const char*, 2>& names() {
        static const std::array<const char*, 2> v{"S", "SS"};
        return v;
    }
    double& operator[](std::size_t i) { return (&S)[i]; }
    double operator[](std::size_t i) const { return (&S)[i]; }
    bool finite() const { return std::isfinite(S) && std::isfinite(SS); }
};

/// Real parts of the linearization spectrum on C0.
/// lambda1 = lambda2 = 0 (slow directions), lambda3 = -gamma, lambda4 = -2 gamma,
/// lambda5 = beta (n-1) SS / (n S) - (gamma + beta).
struct EigenData {
    double lambda1 = 0, lambda2 = 0, lambda3 = 0, lambda4 = 0, lambda5 = 0;
};

} // namespace pairsirs
