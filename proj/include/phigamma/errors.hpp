#pragma once

#include <stdexcept>
#include <string>

namespace phigamma {

// Base class for all library errors.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// A result would need more digits / a wider window than the ring carries.
struct PrecisionError : Error {
    using Error::Error;
};

// A matrix that must be invertible over its base ring is not.
struct NotEtaleError : Error {
    using Error::Error;
};

// Input is structurally valid but outside the modes this build supports.
struct UnsupportedModeError : Error {
    using Error::Error;
};

}  // namespace phigamma
