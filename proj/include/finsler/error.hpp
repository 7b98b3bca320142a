#pragma once

#include <stdexcept>
#include <string>

namespace finsler {

/// Base of every error raised by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A point (or a stencil point around it) lies outside the chart domain.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// The fundamental tensor g is singular or not positive definite.
class DegenerateMetric : public Error {
 public:
  DegenerateMetric(const std::string& what, double smallest_eigenvalue)
      : Error(what), smallest_eigenvalue_(smallest_eigenvalue) {}
  double smallest_eigenvalue() const noexcept { return smallest_eigenvalue_; }

 private:
  double smallest_eigenvalue_;
};

/// Slot index or tensor signature not valid for the requested operation.
class RankError : public Error {
 public:
  using Error::Error;
};

/// The derivative backend cannot deliver the requested derivative order.
class OrderUnsupported : public Error {
 public:
  using Error::Error;
};

/// Finite differences lost their significant digits to cancellation.
class StepTooSmall : public Error {
 public:
  using Error::Error;
};

/// A declared h(r) function fails the Euler relation y^j d_j f = r f.
class HomogeneityError : public Error {
 public:
  using Error::Error;
};

/// Scalar-curvature classification needs dimension three or more.
class DimensionTooSmall : public Error {
 public:
  using Error::Error;
};

/// Redundant criteria that must agree did not.
class InternalInconsistency : public Error {
 public:
  using Error::Error;
};

/// Invalid run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace finsler
