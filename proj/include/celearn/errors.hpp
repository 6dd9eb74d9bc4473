#pragma once

#include <stdexcept>
#include <string>

namespace celearn {

// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Size caps exceeded (CLI exit code 2).
class CapError : public Error {
 public:
  using Error::Error;
};

// Numerical solver breakdown (CLI exit code 3).
class SolverError : public Error {
 public:
  using Error::Error;
};

class InfeasibleAllocation : public Error {
 public:
  using Error::Error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class IncompatibleMarkets : public Error {
 public:
  using Error::Error;
};

class EmptyIndexSet : public Error {
 public:
  using Error::Error;
};

class InvalidDistinct : public Error {
 public:
  using Error::Error;
};

class ParseError : public Error {
 public:
  using Error::Error;
};

class SchemaViolation : public Error {
 public:
  using Error::Error;
};

class NotWelfareMaximizing : public Error {
 public:
  using Error::Error;
};

class DomainError : public Error {
 public:
  using Error::Error;
};

class InvalidSchedule : public Error {
 public:
  using Error::Error;
};

class DivisionByZero : public Error {
 public:
  using Error::Error;
};

class TooManyGoods : public CapError {
 public:
  using CapError::CapError;
};

class EnumerationTooLarge : public CapError {
 public:
  using CapError::CapError;
};

class LPNumericalFailure : public SolverError {
 public:
  using SolverError::SolverError;
};

}  // namespace celearn
