#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace pairsirs {

/// Model parameters: infection rate beta (per SI edge), recovery rate gamma,
/// waning rate epsilon, node degree n. gamma defaults to 1 (time unit = mean
/// infectious period); n is kept as a double because bifurcation sweeps treat
/// it as a real parameter of the closed ODEs.
struct Params {
    double beta = 2.0;
    double gamma = 1.0;
    double epsilon = 0.0;
    double n = 4.0;

    double kappa() const { return beta * (n - 1.0) / n; }

    void validate() const {
        if (!(std::isfinite(beta) && std::isfinite(gamma) && std::isfinite(epsilon) && std::isfinite(n)))
            throw std::domain_error("Params: non-finite parameter");
        if (beta < 0.0) throw std::domain_error("Params: beta must be >= 0");
        if (gamma <= 0.0) throw std::domain_error("Params: gamma must be > 0");
        if (epsilon < 0.0) throw std::domain_error("Params: epsilon must be >= 0");
        if (n <= 2.0) throw std::domain_error("Params: degree n must exceed 2");
    }

    // epsilon << beta, gamma is what makes the fast-slow split meaningful.
    bool fast_slow_valid() const {
        return epsilon < std::fmin(beta, gamma);
    }
};

/// R0 = beta (n-2) / gamma for the eps -> 0 limit. Requires n > 2.
inline double r0(const Params& p) {
    p.validate();
    return p.beta * (p.n - 2.0) / p.gamma;
}

/// R1 = beta (n-1)(gamma+eps) / (gamma (gamma+beta+eps)); the SI-edge
/// reproduction number. At eps = 0 this is beta (n-1)/(beta+gamma), and
/// sign(R1-1) = sign(R0-1).
inline double r1_closed(const Params& p) {
    p.validate();
    return p.beta * (p.n - 1.0) * (p.gamma + p.epsilon)
           / (p.gamma * (p.gamma + p.beta + p.epsilon));
}

} // namespace pairsirs
