#pragma once

#include <stdexcept>
#include <string>

namespace distphylo {

// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed or inconsistent input (CLI exit code 2).
class InputError : public Error {
 public:
  using Error::Error;
};

// Value outside the domain of a transform (CLI exit code 3).
class DomainError : public Error {
 public:
  using Error::Error;
};

// JC correction hit the saturation point H >= 3/4.
class SaturationError : public DomainError {
 public:
  using DomainError::DomainError;
};

// Internal consistency check failed (CLI exit code 4).
class InvariantError : public Error {
 public:
  using Error::Error;
};

}  // namespace distphylo
