// errors.hpp — exception hierarchy shared by the library and the CLI.

#pragma once

#include <stdexcept>
#include <string>

namespace cohmeter {

// Base class. The three direct children define the CLI exit-code mapping:
// InputError -> 2, DomainError -> 3, NumericalError -> 4.
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct InputError : Error {
    using Error::Error;
};
struct DomainError : Error {
    using Error::Error;
};
struct NumericalError : Error {
    using Error::Error;
};

// Malformed or unreadable input files.
struct ParseError : InputError {
    using InputError::InputError;
};

struct NonNormalizedState : DomainError {
    using DomainError::DomainError;
};
struct NonNormalizedProbabilities : DomainError {
    using DomainError::DomainError;
};
struct InvalidRank : DomainError {
    using DomainError::DomainError;
};
struct RankTooLow : DomainError {
    using DomainError::DomainError;
};
struct DimensionMismatch : DomainError {
    using DomainError::DomainError;
};
struct IndexOutOfRange : DomainError {
    using DomainError::DomainError;
};
struct SameSite : DomainError {
    using DomainError::DomainError;
};
struct InvalidGamma : DomainError {
    using DomainError::DomainError;
};
struct NegativeRate : DomainError {
    using DomainError::DomainError;
};
struct AsymmetricCoupling : DomainError {
    using DomainError::DomainError;
};
struct NotTracePreserving : DomainError {
    using DomainError::DomainError;
};
struct DimensionTooLarge : DomainError {
    using DomainError::DomainError;
};
struct InvalidState : DomainError {
    using DomainError::DomainError;
};

struct ExplosionGuard : NumericalError {
    using NumericalError::NumericalError;
};
struct StepTooLarge : NumericalError {
    using NumericalError::NumericalError;
};

}  // namespace cohmeter
