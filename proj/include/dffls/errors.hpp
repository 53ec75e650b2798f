#pragma once

#include <stdexcept>
#include <string>

namespace dffls {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DimensionMismatch : Error {
    using Error::Error;
};

struct AsymmetricAdjacency : Error {
    using Error::Error;
};

struct Disconnected : Error {
    using Error::Error;
};

struct PreconditionViolated : Error {
    using Error::Error;
};

struct NonFiniteInput : Error {
    using Error::Error;
};

struct SingularCombination : Error {
    using Error::Error;
};

struct SnapshotsMissing : Error {
    using Error::Error;
};

struct WindowExceedsHorizon : Error {
    using Error::Error;
};

struct ConfigInvalid : Error {
    using Error::Error;
};

// Numerical failure inside a simulation, annotated with step/sensor context.
struct RuntimeFailure : Error {
    using Error::Error;
};

}  // namespace dffls
