#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace carnot {

/// Largest ambient dimension supported by the fixed-capacity vector types.
inline constexpr int kMaxDim = 16;

using Vector = Eigen::Matrix<double, Eigen::Dynamic, 1, 0, kMaxDim, 1>;
using Matrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, 0, kMaxDim, kMaxDim>;

/// A point of the group in exponential coordinates, layers stored in order.
using Point = Vector;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad shapes, out-of-range parameters, unknown names.
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// Evaluation requested outside the smoothness domain of a field (usually the pole).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A quadrature sample produced NaN or infinity.
class NonFiniteSample : public Error {
 public:
  using Error::Error;
};

/// Test function whose denominator integral cannot be distinguished from zero.
class DegenerateTestFunction : public Error {
 public:
  using Error::Error;
};

/// The configured budget could not reach the requested tolerance.
class ToleranceNotMet : public Error {
 public:
  using Error::Error;
};

}  // namespace carnot
