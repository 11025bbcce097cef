#pragma once

#include <stdexcept>
#include <string>

namespace anosov {

// Every library failure derives from Error; the CLI maps the families below
// onto its exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

// Element-count or wall-time budget exhausted.
class BudgetError : public Error {
 public:
  using Error::Error;
};

// A numerical assertion that must hold (identity check, audit, construction).
class AssertionFailure : public Error {
 public:
  using Error::Error;
};

class ConstructionError : public AssertionFailure {
 public:
  using AssertionFailure::AssertionFailure;
};

class NoGapError : public Error {
 public:
  using Error::Error;
};

class NonTransverseError : public Error {
 public:
  using Error::Error;
};

class OverflowError : public Error {
 public:
  using Error::Error;
};

class DimensionError : public Error {
 public:
  using Error::Error;
};

class QuantizationCollision : public Error {
 public:
  using Error::Error;
};

class EstimationError : public Error {
 public:
  using Error::Error;
};

class ConeViolation : public Error {
 public:
  using Error::Error;
};

}  // namespace anosov
