#pragma once

#include <array>
#include <functional>
#include <limits>
#include <utility>

#include "carnot/jet.hpp"

namespace carnot {

enum class Smoothness { everywhere, away_from_origin };

/// Evaluable scalar function on the group carrying exact first and second
/// ambient derivatives.
///
/// The second-order evaluator is mandatory. A first-order evaluator may be
/// supplied as a fast path for integrands that only need gradients; when it is
/// absent the second-order jet is computed and truncated.
class ScalarField {
 public:
  using Eval2 = std::function<Jet2(const Point&)>;
  using Eval1 = std::function<Jet1(const Point&)>;

  ScalarField() = default;
  explicit ScalarField(Eval2 jet2, Smoothness smoothness = Smoothness::everywhere, Eval1 jet1 = {})
      : jet2_(std::move(jet2)), jet1_(std::move(jet1)), smoothness_(smoothness) {}

  /// Builds both evaluators from one generic callable `f(vars)`, where `vars`
  /// is a span-like array of coordinate jets of the matching order.
  template <typename F>
  static ScalarField from_generic(F f, Smoothness smoothness = Smoothness::everywhere) {
    auto make = [f]<int O>(const Point& x) {
      std::array<Jet<O>, kMaxDim> vars;
      for (Eigen::Index i = 0; i < x.size(); ++i) vars[i] = Jet<O>::variable(x[i], i, x.size());
      return f(vars, x.size());
    };
    return ScalarField([make](const Point& x) { return make.template operator()<2>(x); }, smoothness,
                       [make](const Point& x) { return make.template operator()<1>(x); });
  }

  explicit operator bool() const { return static_cast<bool>(jet2_); }

  Smoothness smoothness() const { return smoothness_; }

  bool in_domain(const Point& x) const {
    return smoothness_ == Smoothness::everywhere || !x.isZero(0.0);
  }

  Jet2 jet2(const Point& x) const {
    check(x);
    return jet2_(x);
  }

  Jet1 jet1(const Point& x) const {
    check(x);
    return jet1_ ? jet1_(x) : truncate(jet2_(x));
  }

  template <int O>
  Jet<O> jet(const Point& x) const {
    if constexpr (O == 2) {
      return jet2(x);
    } else {
      return jet1(x);
    }
  }

  double value(const Point& x) const { return jet1(x).value; }

 private:
  void check(const Point& x) const {
    if (!jet2_) throw InvalidArgument("scalar field has no evaluator");
    if (!in_domain(x)) throw DomainError("field evaluated at the origin, outside its smoothness domain");
  }

  Eval2 jet2_;
  Eval1 jet1_;
  Smoothness smoothness_ = Smoothness::everywhere;
};

/// One-variable profile f with its first two derivatives, supported on [lo, hi].
struct RadialProfile {
  std::function<double(double)> f;
  std::function<double(double)> df;
  std::function<double(double)> d2f;
  double lo = 0.0;
  double hi = std::numeric_limits<double>::infinity();

  bool contains(double r) const { return r >= lo && r <= hi; }
};

}  // namespace carnot
