#pragma once

#include <stdexcept>
#include <string>

namespace bisnorm {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A scalar or configuration argument is out of its allowed range.
class ParameterError : public Error {
 public:
  using Error::Error;
};

// Input data violates a structural precondition (zero row, shape mismatch,
// non-square table, negative entry, ...).
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

// A matrix or vector handed to the scaling routines is not strictly positive.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Target marginals with different totals.
class InfeasibleMarginalsError : public Error {
 public:
  using Error::Error;
};

// Malformed input file.
class ParseError : public Error {
 public:
  using Error::Error;
};

}  // namespace bisnorm
