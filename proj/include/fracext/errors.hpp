#pragma once

#include <stdexcept>
#include <string>

namespace fracext {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input parameter outside its admissible range (beta, s, quadrature order...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// Function argument outside the domain of a special function or kernel.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Degenerate or unsupported mesh / grid.
class MeshError : public Error {
 public:
  using Error::Error;
};

/// A factorization that must succeed for a well-posed problem failed.
class SolverError : public Error {
 public:
  using Error::Error;
};

/// Vanishing denominator in sequence extrapolation.
class ExtrapolationError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracext
