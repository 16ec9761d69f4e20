#pragma once

#include <stdexcept>
#include <string>

namespace ohit {

// Base for all library errors. CLI maps these to exit code 1.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input file (ragged rows, missing columns).
class FormatError : public Error {
  public:
    using Error::Error;
};

// A token that should be numeric is not.
class ParseError : public Error {
  public:
    using Error::Error;
};

class EmptyInputError : public Error {
  public:
    using Error::Error;
};

// Minority tags match all samples or none.
class DegenerateSplitError : public Error {
  public:
    using Error::Error;
};

class ParameterError : public Error {
  public:
    using Error::Error;
};

// Too few rows for the requested estimate (n < 2 for covariance).
class InsufficientDataError : public Error {
  public:
    using Error::Error;
};

// A caller broke a documented precondition.
class ContractViolation : public Error {
  public:
    using Error::Error;
};

// Matrix could not be factorized even after regularization.
class NumericalDegeneracyError : public Error {
  public:
    using Error::Error;
};

// Evaluation asked of a test set missing one of the two classes.
class DegenerateEvaluationError : public Error {
  public:
    using Error::Error;
};

}  // namespace ohit
