#pragma once

#include <stdexcept>
#include <string>

namespace s4is {

/// Root of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input outside the mathematical domain of an operation (support, finiteness).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Caller violated a documented precondition.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Invalid problem, method or run configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// The performance function could not produce a value.
class EvaluationError : public Error {
public:
    using Error::Error;
};

/// External evaluator broke the stdio protocol (malformed line, id mismatch).
class ProtocolError : public EvaluationError {
public:
    using EvaluationError::EvaluationError;
};

/// Non-finite value where a finite one is required.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Surrogate fit failed (kernel matrix not positive definite after nugget escalation).
class FitError : public Error {
public:
    using Error::Error;
};

/// Importance density is zero at a failure sample.
class DensitySupportError : public Error {
public:
    using Error::Error;
};

/// Candidate pool has no unselected points left.
class ExhaustionError : public Error {
public:
    using Error::Error;
};

/// Gradient vanished during an MPP search.
class StationaryPointError : public Error {
public:
    using Error::Error;
};

/// An analysis stage could not produce what the next stage needs.
class StageFailure : public Error {
public:
    using Error::Error;
};

/// No multi-start MPP search converged.
class ExplorationFailure : public StageFailure {
public:
    using StageFailure::StageFailure;
};

/// Report or history data is missing or malformed.
class DataError : public Error {
public:
    using Error::Error;
};

}  // namespace s4is
