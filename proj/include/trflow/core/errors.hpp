#pragma once

#include <stdexcept>
#include <string>

namespace trflow {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Point outside a model's chart domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Totally real margin lost, singular frame, non-positive metric.
class DegenerateError : public Error {
 public:
  using Error::Error;
};

// Operation called on an input it is not defined for.
class UnsupportedError : public Error {
 public:
  using Error::Error;
};

// Scenario / schema violation.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace trflow
