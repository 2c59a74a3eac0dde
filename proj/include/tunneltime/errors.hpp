#pragma once

#include <stdexcept>
#include <string>

namespace tunneltime {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An argument lies outside the domain of the requested quantity (k <= 0, V*a == 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at or too close to a pole of F+ or F-.
class PoleProximity : public Error {
 public:
  using Error::Error;
};

/// An asymptotic form was requested outside its regime of validity.
class RegimeViolation : public Error {
 public:
  using Error::Error;
};

/// Adaptive quadrature or iteration exhausted its budget.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// A quantity that must be real came out with a significant imaginary part.
class ImaginaryResidue : public Error {
 public:
  using Error::Error;
};

/// Newton pole harvest disagrees with the argument-principle count.
class CountMismatch : public Error {
 public:
  CountMismatch(const std::string& what, int harvested, int winding)
      : Error(what), harvested_(harvested), winding_(winding) {}
  int harvested() const noexcept { return harvested_; }
  int winding() const noexcept { return winding_; }

 private:
  int harvested_;
  int winding_;
};

/// The propagation grid cannot hold the initial state or the measurement.
class GridTooSmall : public Error {
 public:
  using Error::Error;
};

/// Too little probability reached the detector to define an arrival time.
class InsufficientFlux : public Error {
 public:
  InsufficientFlux(const std::string& what, double fraction) : Error(what), fraction_(fraction) {}
  double transmitted_fraction() const noexcept { return fraction_; }

 private:
  double fraction_;
};

}  // namespace tunneltime
