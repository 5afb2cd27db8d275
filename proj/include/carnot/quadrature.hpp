#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string_view>
#include <vector>

#include "carnot/field.hpp"
#include "carnot/group.hpp"

namespace carnot {

enum class QuadratureMethod { adaptive_tensor, quasi_monte_carlo, monte_carlo };

std::string_view to_string(QuadratureMethod method);
/// Accepts the full names and the short forms "adaptive", "qmc", "mc".
QuadratureMethod parse_quadrature_method(std::string_view name);

struct QuadratureConfig {
  QuadratureMethod method = QuadratureMethod::monte_carlo;
  std::uint64_t budget = 100000;
  std::uint64_t seed = 1;
  double target_rel_tol = 1e-2;
  /// Thread count; 0 reads THREADS from the environment, then the hardware.
  /// Results never depend on it.
  int workers = 0;

  void validate() const;
};

struct IntegrationResult {
  double value = 0.0;
  /// Standard error for (Q)MC, difference between the last two levels for the tensor rule.
  double error_estimate = 0.0;
  std::uint64_t evals = 0;
  bool tolerance_met = true;
};

/// Axis-aligned box, optionally restricted to a norm annulus R_in <= N(x) < R_out
/// by an indicator. The annulus box has half-width R_out^{w_i} along axis i.
class Domain {
 public:
  static Domain box(Vector lo, Vector hi);
  static Domain norm_annulus(const GroupSpec& g, double r_in, double r_out);

  int dim() const { return static_cast<int>(lo_.size()); }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }
  double box_volume() const;
  bool is_annulus() const { return static_cast<bool>(norm_); }
  double r_in() const { return r_in_; }
  double r_out() const { return r_out_; }
  bool contains(const Point& x) const;

 private:
  Vector lo_, hi_;
  std::function<double(const Point&)> norm_;
  double r_in_ = 0.0;
  double r_out_ = 0.0;
};

using Integrand = std::function<double(const Point&)>;
/// Writes one value per component into `out`.
using VectorIntegrand = std::function<void(const Point&, std::span<double> out)>;

IntegrationResult integrate(const Integrand& f, const Domain& d, const QuadratureConfig& cfg);
IntegrationResult integrate(const ScalarField& f, const Domain& d, const QuadratureConfig& cfg);

/// Integrates several integrands on one shared sample set.
std::vector<IntegrationResult> integrate(int components, const VectorIntegrand& f, const Domain& d,
                                         const QuadratureConfig& cfg);

/// Deterministic recursive pairwise summation.
double pairwise_sum(std::span<const double> values);

int resolve_workers(int requested);

struct RadialGrid {
  int panels = 64;
};

struct RadialIntegrals {
  IntegrationResult numerator;
  IntegrationResult denominator;

  double quotient() const { return numerator.value / denominator.value; }
};

/// One-dimensional form of the Hardy quotient of phi = f(N):
///   numerator   = int r^{alpha+Q-1} f'(r)^2 dr,
///   denominator = int r^{alpha+Q-3} f(r)^2 dr,
/// both computed in s = ln r with a composite 8-point Gauss rule on `panels`
/// panels. The error estimate is the difference from the rule on half as many
/// panels. The common group constant is omitted, so only the ratio is meaningful.
RadialIntegrals radial_reduce(double Q, double alpha, const RadialProfile& f, const RadialGrid& grid = {});

/// Monte-Carlo Lebesgue volume of {N < R}. Throws ToleranceNotMet when the
/// standard error exceeds cfg.target_rel_tol relative to the estimate.
IntegrationResult ball_volume(const GroupSpec& g, double R, const QuadratureConfig& cfg);

}  // namespace carnot
