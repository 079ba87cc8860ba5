#pragma once

#include <stdexcept>
#include <string>

namespace wavestab {

/// Base class for all errors raised by the library.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation outside the model's admissible interval, or cap(v) <= 0.
struct DomainError : Error {
    using Error::Error;
};

/// No center point of the potential found in the scanned interval.
struct NoWellError : Error {
    using Error::Error;
};

/// Energy level at or below the well minimum: no oscillation.
struct NoOscillationError : Error {
    using Error::Error;
};

/// Energy level at or above the surrounding barrier: orbit unbounded or homoclinic.
struct AboveBarrierError : Error {
    using Error::Error;
};

/// Turning point is degenerate (harmonic or soliton limit reached exactly).
struct NonSimpleRootError : Error {
    using Error::Error;
};

/// A finite-difference stencil displacement left the wave-existence region.
struct StencilError : Error {
    StencilError(const std::string& what, int variable, double displacement)
        : Error(what), variable(variable), displacement(displacement) {}
    int variable;        // index of the displaced parameter
    double displacement; // signed step that failed
};

/// Malformed config file; line is 1-based.
struct ConfigError : Error {
    ConfigError(const std::string& what, int line) : Error(what), line(line) {}
    int line;
};

} // namespace wavestab
