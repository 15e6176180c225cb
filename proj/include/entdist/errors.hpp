#pragma once

#include <stdexcept>
#include <string>

namespace entdist {

// Base class for everything the simulator can throw on purpose.
struct SimError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Invalid numeric parameters (non-unit noise pairs, bad fiber geometry, ...).
struct ParameterError : SimError {
    using SimError::SimError;
};

// Malformed or misused optical element (identical output ports, rule
// producing labels outside the declared alphabet, probe already charged).
struct ElementError : SimError {
    using SimError::SimError;
};

// Photon found in a spatial mode the element is not wired for, or a state
// inconsistent with a declared collapse outcome.
struct RoutingError : SimError {
    using SimError::SimError;
};

// Measurement misuse: vacuum state, probe still entangled, readout before
// the QND stage, incomplete outcome labels.
struct MeasurementError : SimError {
    using SimError::SimError;
};

// Photon-count or probe-count mismatch between states.
struct DimensionError : SimError {
    using SimError::SimError;
};

// Frequency erasure applied while frequency-distinct terms still interfere
// (post-erasure norm off unity beyond tolerance), or a W0 photon entering
// a frequency-routing device.
struct ErasureError : SimError {
    using SimError::SimError;
};

} // namespace entdist
