#pragma once

#include <cmath>
#include <functional>

#include "carnot/group.hpp"
#include "carnot/random.hpp"

namespace carnot::test {

/// Central-difference gradient and Hessian of a scalar function.
struct FiniteDifference {
  Vector gradient;
  Matrix hessian;
};

inline FiniteDifference finite_difference(const std::function<double(const Point&)>& f, const Point& x,
                                          double h = 1e-4) {
  const auto n = x.size();
  FiniteDifference d{Vector::Zero(n), Matrix::Zero(n, n)};
  const double f0 = f(x);
  for (Eigen::Index i = 0; i < n; ++i) {
    Point p = x, m = x;
    p[i] += h;
    m[i] -= h;
    d.gradient[i] = (f(p) - f(m)) / (2 * h);
    d.hessian(i, i) = (f(p) - 2 * f0 + f(m)) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      Point pp = x, pm = x, mp = x, mm = x;
      pp[i] += h, pp[j] += h;
      pm[i] += h, pm[j] -= h;
      mp[i] -= h, mp[j] += h;
      mm[i] -= h, mm[j] -= h;
      d.hessian(i, j) = d.hessian(j, i) = (f(pp) - f(pm) - f(mp) + f(mm)) / (4 * h * h);
    }
  }
  return d;
}

inline Point uniform_point(int n, std::uint64_t seed, std::uint64_t index, double lo = -2.0, double hi = 2.0) {
  const CounterRng rng(seed);
  Point x(n);
  for (int i = 0; i < n; ++i) x[i] = rng.uniform(index, i, lo, hi);
  return x;
}

inline double relative_error(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

inline const char* const kBuiltins[] = {"h1", "h2", "h3", "quaternionic-h1", "abelian-3"};

}  // namespace carnot::test
