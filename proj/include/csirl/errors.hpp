#pragma once

#include <stdexcept>
#include <string>

namespace csirl {

// Base class for all library failures.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Caller passed something with the wrong shape or out-of-contract value.
struct InvalidInputError : Error {
    using Error::Error;
};

// A computation produced NaN/inf; carries diagnostics, never propagates silently.
struct NumericError : Error {
    using Error::Error;
};

// Trajectory/checkpoint file could not be parsed.
struct ParseError : Error {
    using Error::Error;
};

// File parsed but its contents contradict the declared schema (e.g. dims).
struct SchemaError : Error {
    using Error::Error;
};

// Run configuration is inconsistent or refers to missing resources.
struct ConfigError : Error {
    using Error::Error;
};

}  // namespace csirl
