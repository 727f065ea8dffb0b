#pragma once

#include <stdexcept>
#include <string>

namespace admg {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed graph structure (asymmetric B, self loops, cycles where forbidden).
class InvalidGraphError : public Error {
public:
    using Error::Error;
};

/// Caller passed an out-of-range vertex, mismatched shapes, or a bad option.
class ArgumentError : public Error {
public:
    using Error::Error;
};

/// primal_fix called on a vertex that is not primal fixable.
class NotFixableError : public Error {
public:
    using Error::Error;
};

/// Singular or indefinite matrices, non-finite values.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Rejection sampler ran out of draws.
class GenerationError : public Error {
public:
    using Error::Error;
};

/// Negative entries passed to a penalty that expects non-negative matrices.
class DomainError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

/// Parse failures in CSV / JSON / edge-list input.
class FormatError : public Error {
public:
    using Error::Error;
};

}  // namespace admg
