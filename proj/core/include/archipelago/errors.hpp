#pragma once

#include <stdexcept>
#include <string>

namespace archipelago {

/// Bad value passed to an operation (shape mismatch, non-finite input, ...).
struct ArgumentError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

/// Inconsistent data crossing a module boundary (missing fitness entry,
/// mixed-species batch, malformed checkpoint).
struct DataIntegrityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Invalid experiment or game configuration. Raised before any work starts.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Operation applied to an object in the wrong state (stepping a finished
/// episode, resuming a corrupt run).
struct StateError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

}  // namespace archipelago
