#pragma once

#include <stdexcept>
#include <string>

namespace pairsirs {

// Step size underflow in the adaptive integrator; message carries the last state.
struct StiffnessError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Newton or bisection failed to converge within its iteration budget.
struct ConvergenceError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Two redundant computations of the same quantity disagree beyond tolerance.
struct ConsistencyError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Random graph generation exhausted its retry budget.
struct GenerationError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

} // namespace pairsirs
