#pragma once

#include <stdexcept>
#include <string>

namespace spingate {

/// Base class for all domain errors raised by the simulator core.
struct SimError : std::runtime_error {
    explicit SimError(const std::string& what) : std::runtime_error(what) {}
};

struct NonFiniteInput : SimError {
    using SimError::SimError;
};

struct NonNormalizedInput : SimError {
    using SimError::SimError;
};

struct IndexOutOfRange : SimError {
    using SimError::SimError;
};

struct ZeroNormRegister : SimError {
    using SimError::SimError;
};

struct UnknownLabel : SimError {
    using SimError::SimError;
};

struct DuplicateLabel : SimError {
    using SimError::SimError;
};

struct RegisterTooLarge : SimError {
    using SimError::SimError;
};

struct WrongDimension : SimError {
    using SimError::SimError;
};

struct ShapeMismatch : SimError {
    using SimError::SimError;
};

struct KindMismatch : SimError {
    using SimError::SimError;
};

struct FrequencyMismatch : SimError {
    using SimError::SimError;
};

struct DegenerateFidelity : SimError {
    using SimError::SimError;
};

struct InvalidParameter : SimError {
    using SimError::SimError;
};

}  // namespace spingate
