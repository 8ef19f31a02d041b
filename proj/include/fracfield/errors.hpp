#pragma once

#include <stdexcept>
#include <string>

namespace fracfield {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the mathematical domain of an operation (poles, bad orders, t <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A series or iteration exhausted its term budget before meeting its tolerance.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature could not reach the requested accuracy.
class QuadratureError : public Error {
 public:
  using Error::Error;
};

/// lambda = mu = 0: no spatial operator, nothing to classify.
class DegenerateParamsError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The frequency integral of the mean does not exist (a(xi) bounded when lambda = 0).
class NonIntegrableError : public DomainError {
 public:
  using DomainError::DomainError;
};

/// The variance series hits a vanishing denominator 1 - (m+1) alpha.
class ResonanceError : public Error {
 public:
  ResonanceError(int m, const std::string& what) : Error(what), m_(m) {}
  int m() const noexcept { return m_; }

 private:
  int m_;
};

/// Simulation requested for a parameter set whose solution is not mild.
class NotMildError : public Error {
 public:
  using Error::Error;
};

/// Reference profile and ensemble statistics live on incompatible grids.
class GridMismatchError : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration or command-line input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace fracfield
