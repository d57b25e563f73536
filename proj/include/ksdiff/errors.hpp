#pragma once

#include <stdexcept>
#include <string>

namespace ksdiff {

/// Base class for every exception raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A caller-supplied parameter violates a documented invariant.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// The evaluation itself failed (pole, non-convergence, range overflow, ...).
class NumericError : public Error {
public:
    using Error::Error;
};

class PoleError : public NumericError {
public:
    using NumericError::NumericError;
};

class DomainError : public NumericError {
public:
    using NumericError::NumericError;
};

class ConvergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

class RangeError : public NumericError {
public:
    using NumericError::NumericError;
};

class DegenerateRootError : public NumericError {
public:
    using NumericError::NumericError;
};

}  // namespace ksdiff
