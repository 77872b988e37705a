#pragma once

#include <stdexcept>
#include <string>

namespace qrobust {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input: bad dimensions, non-Hermitian operators, negative rates, invalid states.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

class DimensionMismatch : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// A perturbation strength outside the admissible interval of its structure.
class RangeViolation : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Fidelity against a mixed reference state is not defined by the overlap formula.
class ImpureReference : public InvalidArgument {
public:
    using InvalidArgument::InvalidArgument;
};

/// Numerical failures: singular systems and poles.
class NumericalError : public Error {
public:
    using Error::Error;
};

/// The reduced generator is singular, so the steady state is not unique.
class NonUniqueSteadyState : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// The Laplace point coincides (within conditioning limits) with a pole of the resolvent.
class PoleError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

/// Configuration could not be parsed or failed validation.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Internal invariant broken (e.g. a generator that does not preserve trace).
class ConsistencyError : public Error {
public:
    using Error::Error;
};

} // namespace qrobust
