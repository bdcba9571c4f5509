#pragma once

#include <stdexcept>

namespace cascade {

// Parameter/domain violations detected before any numerics run.
struct InvalidParams : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

struct NumericsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Eigensolver failed to converge on a small dense matrix.
struct NonConvergence : NumericsError {
    using NumericsError::NumericsError;
};

// Eigenvector basis is (numerically) rank deficient; the spectral
// representation cannot be trusted and callers must step instead.
struct DegenerateSpectrum : NumericsError {
    using NumericsError::NumericsError;
};

// Requested RK step violates the stability precondition.
struct StepTooLarge : NumericsError {
    using NumericsError::NumericsError;
};

// The master-equation generator failed its reconstruction check.
struct DegenerateGenerator : NumericsError {
    using NumericsError::NumericsError;
};

// The requested integration window leaves too much excitation behind
// for quadrature results to be meaningful.
struct TailTooHeavy : NumericsError {
    using NumericsError::NumericsError;
};

} // namespace cascade
