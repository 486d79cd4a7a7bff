#pragma once

#include <stdexcept>
#include <string>

namespace nvbeat {

/// Base class for all errors raised by the toolkit. Messages are meant to be
/// shown to users verbatim.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input violates a documented precondition or type invariant.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a meaningful answer for valid
/// input (unresolved manifolds, unbracketed extremum, degenerate fit...).
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace nvbeat
