#ifndef BECSIM_ERRORS_HPP
#define BECSIM_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace becsim {

// Base class for model-level failures, as opposed to std::invalid_argument
// raised on malformed inputs.
struct PhysicsError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Gravity overwhelms the trap: no local minimum, or depth <= 0.
struct NoBoundMinimum : PhysicsError {
    using PhysicsError::PhysicsError;
};

// Partition-function integral has no convergent cutoff (potential bounded).
struct DivergentIntegral : PhysicsError {
    using PhysicsError::PhysicsError;
};

// Root bracketing failed inside the allowed window.
struct NoRoot : PhysicsError {
    using PhysicsError::PhysicsError;
};

// Loading-time formula called with a dimple emptier than the reservoir.
struct InvalidRegime : PhysicsError {
    using PhysicsError::PhysicsError;
};

// Evaporation rate requested below the eta > 5/2 + delta positivity bound.
struct InvalidEta : PhysicsError {
    using PhysicsError::PhysicsError;
};

// ODE controller cannot satisfy the tolerance at the minimum step size.
struct StepFailure : PhysicsError {
    using PhysicsError::PhysicsError;
};

// Integration state left the physical domain (N or T crossing zero).
struct NonPhysical : PhysicsError {
    using PhysicsError::PhysicsError;
};

// Malformed scenario configuration or units.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// reproduce() called with an unknown figure id.
struct UnknownFigure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace becsim

#endif
