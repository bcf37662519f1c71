#pragma once

#include <stdexcept>
#include <string>

namespace hkl2 {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Operands live in different ambient dimensions or on different grids.
class DimensionMismatch : public Error {
public:
  using Error::Error;
};

/// An operation that needs a pure-degree form received a mixed one.
class DegreeError : public Error {
public:
  using Error::Error;
};

/// Argument outside the domain of an operation (gauge axis, endpoint, r <= a, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// Iterative procedure (quadrature, Newton, closure) did not converge.
class ConvergenceError : public Error {
public:
  using Error::Error;
};

/// A self-check exceeded its tolerance (projection residual, rank gap, disagreement).
class ToleranceError : public Error {
public:
  using Error::Error;
};

} // namespace hkl2
