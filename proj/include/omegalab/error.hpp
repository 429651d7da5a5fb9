#pragma once

#include <stdexcept>
#include <string>

namespace omegalab {

/// Base of all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed configuration or arguments (CLI exit code 1).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Request exceeds sieve or table capacity (CLI exit code 2).
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// Numerical failure: domain, bracket, infeasibility, data (CLI exit code 3).
class NumericError : public Error {
 public:
  using Error::Error;
};

class DomainError : public NumericError {
 public:
  using NumericError::NumericError;
};

class InsufficientDataError : public NumericError {
 public:
  using NumericError::NumericError;
};

class InfeasibleError : public NumericError {
 public:
  using NumericError::NumericError;
};

/// No sign change on a bracket; carries the endpoint values.
class BracketError : public NumericError {
 public:
  BracketError(const std::string& what, double lo, double hi, double f_lo, double f_hi)
      : NumericError(what), lo(lo), hi(hi), f_lo(f_lo), f_hi(f_hi) {}
  double lo, hi, f_lo, f_hi;
};

}  // namespace omegalab
