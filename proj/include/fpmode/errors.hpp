#pragma once

#include <stdexcept>
#include <string>

namespace fpmode {

// Error taxonomy shared by the library and the CLI. The CLI maps
// DomainError/ConfigError to exit code 2 (bad input or configuration) and
// DataError/FitError to exit code 3 (data quality / solver trouble).
struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct DomainError : Error {
    using Error::Error;
};

struct ConfigError : Error {
    using Error::Error;
};

struct DataError : Error {
    using Error::Error;
};

struct FitError : Error {
    using Error::Error;
};

// Observation set cannot constrain the requested free parameters.
struct RankDeficiencyError : FitError {
    using FitError::FitError;
};

// Inputs that need more measurements (e.g. a single waveguide length) are a
// configuration problem, not a solver failure.
struct UnderdeterminedError : ConfigError {
    using ConfigError::ConfigError;
};

// Input sits on a removable singularity of a formula (e.g. n^2 + k^2 = 1).
struct DegenerateInputError : DomainError {
    using DomainError::DomainError;
};

// Grating equation has no solution for the requested geometry.
struct GratingGeometryError : DomainError {
    using DomainError::DomainError;
};

// Instrument response damps the harmonic ladder below the numerical floor.
struct UncorrectableError : DataError {
    using DataError::DataError;
};

} // namespace fpmode
