#pragma once

#include <cmath>

#include "carnot/types.hpp"

namespace carnot {

/// Truncated Taylor expansion of a scalar function at a point.
///
/// Order 1 carries value and ambient gradient; order 2 adds the ambient
/// Hessian. Arithmetic on jets propagates derivatives exactly (forward mode),
/// so a field written with these operators yields derivatives with no
/// truncation error.
template <int Order>
struct Jet {
  static_assert(Order == 1 || Order == 2, "jets are first or second order");

  double value = 0.0;
  Vector gradient;
  Matrix hessian;  // empty for Order == 1

  static Jet constant(double c, Eigen::Index n) {
    Jet j;
    j.value = c;
    j.gradient.setZero(n);
    if constexpr (Order == 2) j.hessian.setZero(n, n);
    return j;
  }

  static Jet variable(double x, Eigen::Index index, Eigen::Index n) {
    Jet j = constant(x, n);
    j.gradient[index] = 1.0;
    return j;
  }

  Eigen::Index dim() const { return gradient.size(); }
};

using Jet1 = Jet<1>;
using Jet2 = Jet<2>;

inline Jet1 truncate(const Jet2& j) {
  Jet1 r;
  r.value = j.value;
  r.gradient = j.gradient;
  return r;
}

/// Chain rule for h = f(u) given f(u), f'(u), f''(u).
template <int O>
Jet<O> compose(const Jet<O>& u, double f, double df, double d2f) {
  Jet<O> r;
  r.value = f;
  r.gradient = df * u.gradient;
  if constexpr (O == 2) {
    r.hessian = df * u.hessian;
    r.hessian.noalias() += d2f * (u.gradient * u.gradient.transpose());
  }
  return r;
}

template <int O>
Jet<O> operator+(const Jet<O>& a, const Jet<O>& b) {
  Jet<O> r;
  r.value = a.value + b.value;
  r.gradient = a.gradient + b.gradient;
  if constexpr (O == 2) r.hessian = a.hessian + b.hessian;
  return r;
}

template <int O>
Jet<O> operator-(const Jet<O>& a, const Jet<O>& b) {
  Jet<O> r;
  r.value = a.value - b.value;
  r.gradient = a.gradient - b.gradient;
  if constexpr (O == 2) r.hessian = a.hessian - b.hessian;
  return r;
}

template <int O>
Jet<O> operator-(const Jet<O>& a) {
  Jet<O> r;
  r.value = -a.value;
  r.gradient = -a.gradient;
  if constexpr (O == 2) r.hessian = -a.hessian;
  return r;
}

template <int O>
Jet<O> operator*(const Jet<O>& a, const Jet<O>& b) {
  Jet<O> r;
  r.value = a.value * b.value;
  r.gradient = a.value * b.gradient + b.value * a.gradient;
  if constexpr (O == 2) {
    r.hessian = a.value * b.hessian + b.value * a.hessian;
    r.hessian.noalias() += a.gradient * b.gradient.transpose();
    r.hessian.noalias() += b.gradient * a.gradient.transpose();
  }
  return r;
}

template <int O>
Jet<O> operator*(double s, const Jet<O>& a) {
  Jet<O> r;
  r.value = s * a.value;
  r.gradient = s * a.gradient;
  if constexpr (O == 2) r.hessian = s * a.hessian;
  return r;
}

template <int O>
Jet<O> operator*(const Jet<O>& a, double s) {
  return s * a;
}

template <int O>
Jet<O> operator+(const Jet<O>& a, double s) {
  Jet<O> r = a;
  r.value += s;
  return r;
}

template <int O>
Jet<O> operator+(double s, const Jet<O>& a) {
  return a + s;
}

template <int O>
Jet<O> operator-(const Jet<O>& a, double s) {
  return a + (-s);
}

template <int O>
Jet<O> operator-(double s, const Jet<O>& a) {
  return (-a) + s;
}

template <int O>
Jet<O> reciprocal(const Jet<O>& a) {
  const double inv = 1.0 / a.value;
  return compose(a, inv, -inv * inv, 2.0 * inv * inv * inv);
}

template <int O>
Jet<O> operator/(const Jet<O>& a, const Jet<O>& b) {
  return a * reciprocal(b);
}

template <int O>
Jet<O> operator/(const Jet<O>& a, double s) {
  return (1.0 / s) * a;
}

template <int O>
Jet<O> operator/(double s, const Jet<O>& a) {
  return s * reciprocal(a);
}

template <int O>
Jet<O> square(const Jet<O>& a) {
  return compose(a, a.value * a.value, 2.0 * a.value, 2.0);
}

template <int O>
Jet<O> pow(const Jet<O>& a, double s) {
  const double p = std::pow(a.value, s - 2.0);
  return compose(a, p * a.value * a.value, s * p * a.value, s * (s - 1.0) * p);
}

template <int O>
Jet<O> sqrt(const Jet<O>& a) {
  const double r = std::sqrt(a.value);
  return compose(a, r, 0.5 / r, -0.25 / (r * a.value));
}

template <int O>
Jet<O> exp(const Jet<O>& a) {
  const double e = std::exp(a.value);
  return compose(a, e, e, e);
}

template <int O>
Jet<O> log(const Jet<O>& a) {
  return compose(a, std::log(a.value), 1.0 / a.value, -1.0 / (a.value * a.value));
}

template <int O>
Jet<O> sin(const Jet<O>& a) {
  const double s = std::sin(a.value);
  return compose(a, s, std::cos(a.value), -s);
}

template <int O>
Jet<O> cos(const Jet<O>& a) {
  const double c = std::cos(a.value);
  return compose(a, c, -std::sin(a.value), -c);
}

}  // namespace carnot
