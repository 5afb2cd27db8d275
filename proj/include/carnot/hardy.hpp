#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carnot/field.hpp"
#include "carnot/group.hpp"
#include "carnot/quadrature.hpp"

namespace carnot {

/// ((Q + alpha - 2) / 2)^2. Throws unless Q + alpha - 2 > 0.
double sharp_constant(double Q, double alpha);

/// (2 - Q - alpha) / 2, the maximiser of -beta^2 - beta (alpha + Q - 2).
double optimal_beta(double Q, double alpha);

/// Weighted Hardy problem on a group: weight w = N^alpha, potential
/// q = N^alpha |grad_G N|^2 / N^2.
class HardyProblem {
 public:
  HardyProblem(GroupSpec group, double alpha);

  const GroupSpec& group() const { return group_; }
  double alpha() const { return alpha_; }
  double homogeneous_dimension() const { return group_.homogeneous_dimension(); }
  double sharp_constant() const;

  double weight(const Point& x) const;
  double potential(const Point& x) const;

 private:
  GroupSpec group_;
  double alpha_;
};

/// Smooth bump (1 + <tilt, (x - c) / r>) exp(1 - 1 / (1 - s^p)),
/// s = sum_i ((x_i - c_i) / r_i)^2, supported in the ellipsoid s < 1.
struct Bump {
  Point center;
  Vector radii;
  Vector tilt;
  int plateau = 1;  // p, 1 or 2; larger flattens the top
};

/// Seeded bump with center norm log-uniform in [0.2, 5] whose support
/// excludes the origin.
Bump random_bump(const GroupSpec& g, std::uint64_t seed, std::uint64_t index);

/// Compactly supported test function away from the origin (except gauge_bump).
class TestFunction {
 public:
  enum class Kind { radial, bump, gauge_bump, general };

  /// phi = N^beta g(ln N), `cutoff` a profile in s = ln N with bounded support.
  static TestFunction radial(double beta, RadialProfile cutoff);
  /// radial with g(s) = sin(pi (s - ln r_in) / L) on [ln r_in, ln r_in + L].
  static TestFunction log_sine(double beta, double r_in, double L);
  static TestFunction bump(Bump b);
  /// phi = exp(1 - 1 / (1 - N^4 / R^4)), smooth through the origin with phi(0) = 1.
  static TestFunction gauge_bump(double radius);
  static TestFunction general(ScalarField f, Vector lo, Vector hi);

  /// phi o delta_lambda.
  TestFunction dilated(double lambda) const;

  Kind kind() const { return kind_; }
  double beta() const { return beta_; }
  const Bump& bump_parameters() const { return bump_; }

  template <int O>
  Jet<O> jet(const GroupSpec& g, const Point& x) const;

  /// Integration domain covering the support.
  Domain support(const GroupSpec& g) const;

  /// f(r) = phi restricted to N = r; radial kind only.
  RadialProfile radial_profile() const;

 private:
  TestFunction() = default;

  template <int O>
  Jet<O> undilated_jet(const GroupSpec& g, const Point& x) const;

  Kind kind_ = Kind::general;
  double beta_ = 0.0;
  RadialProfile cutoff_;
  Bump bump_;
  double radius_ = 1.0;
  ScalarField field_;
  Vector lo_, hi_;
  double dilation_ = 1.0;
};

enum class QuotientMethod { full_dim, radial_1d };
std::string_view to_string(QuotientMethod method);
QuotientMethod parse_quotient_method(std::string_view name);

struct HardyReport {
  std::string group;
  double alpha = 0.0;
  QuotientMethod method = QuotientMethod::full_dim;
  QuadratureConfig config;
  IntegrationResult numerator;
  IntegrationResult denominator;
  double quotient = 0.0;
  double quotient_error = 0.0;  // one standard error, propagated from both integrals
  double sharp_constant = 0.0;
  double relative_gap = 0.0;  // quotient / sharp_constant - 1
  double relative_gap_error = 0.0;
  bool tolerance_met = true;

  /// relative_gap >= -sigmas * relative_gap_error
  bool satisfies_bound(double sigmas = 3.0) const;
};

/// int N^alpha |grad_G phi|^2 over int N^alpha |grad_G N|^2 / N^2 phi^2.
/// radial_1d uses the polar reduction and requires a radial test function.
/// Throws DegenerateTestFunction when the denominator is not distinguishable from 0.
HardyReport rayleigh_quotient(const HardyProblem& p, const TestFunction& phi, const QuadratureConfig& cfg,
                              QuotientMethod method);

struct SweepRow {
  double L = 0.0;
  double quotient = 0.0;
  double predicted = 0.0;  // C + pi^2 / L^2
  double deviation = 0.0;  // |quotient - predicted|
};

struct SweepResult {
  std::string group;
  double alpha = 0.0;
  double sharp_constant = 0.0;
  double r_in = 1.0;
  std::vector<SweepRow> rows;
  /// Least-squares slope of log(quotient - C) against log L.
  double gap_slope = 0.0;
};

/// Quotients of phi_L = N^{beta*} sin(pi ln(N / r_in) / L) by the radial reduction.
SweepResult sharpness_sweep(const HardyProblem& p, const std::vector<double>& L_grid, double r_in = 1.0);

/// L = ln 10^k for k = 1..decades.
std::vector<double> decade_grid(int decades);

struct UncertaintyReport {
  IntegrationResult position;  // int N^2 |grad N|^2 phi^2
  IntegrationResult kinetic;   // int |grad phi|^2
  IntegrationResult mass;      // int |grad N|^2 phi^2
  double lhs = 0.0;
  double lhs_error = 0.0;
  double rhs = 0.0;
  double rhs_error = 0.0;
  bool ok = true;  // lhs >= rhs - 3 combined standard errors
};

UncertaintyReport uncertainty_check(const GroupSpec& g, const TestFunction& phi, const QuadratureConfig& cfg);

struct CertifyOptions {
  int samples = 1000;
  std::uint64_t seed = 1;
  double algebraic_threshold = 1e-9;
  double harmonic_threshold = 1e-6;
};

struct NormCertification {
  double homogeneity = 0.0;
  double symmetry = 0.0;
  double positivity = 0.0;
  double harmonicity = 0.0;
  bool homogeneity_ok = false;
  bool symmetry_ok = false;
  bool positivity_ok = false;
  bool harmonicity_ok = false;
  int samples = 0;

  bool passed() const { return homogeneity_ok && symmetry_ok && positivity_ok && harmonicity_ok; }
};

/// Samples the homogeneous-norm axioms and the harmonicity of N^{2-Q} off the
/// origin, all as relative or scale-normalised residuals.
NormCertification certify_norm(const GroupSpec& g, const ScalarField& candidate, const CertifyOptions& options = {});

/// int <grad_G Psi, grad_G phi> dx with Psi = c N^{2-Q}; c defaults to the
/// group's fundamental-solution constant. Equals phi(0) when c normalises Psi.
IntegrationResult dirac_normalization(const GroupSpec& g, const TestFunction& phi, const QuadratureConfig& cfg,
                                      std::optional<double> constant = std::nullopt);

/// Constant c making c N^{2-Q} a fundamental solution, from the flux of
/// grad N^{2-Q} through {N = 1}: c = 1 / ((Q - 2) Q int_{N<1} |grad_G N|^2).
IntegrationResult flux_normalization(const GroupSpec& g, const QuadratureConfig& cfg);

class InequalityViolation : public Error {
 public:
  InequalityViolation(std::string diagnostic, HardyReport report)
      : Error(std::move(diagnostic)), report_(std::move(report)) {}
  const HardyReport& report() const { return report_; }

 private:
  HardyReport report_;
};

struct BatteryRow {
  std::uint64_t index = 0;
  Bump bump;
  HardyReport report;
};

/// Full-dimensional quotients of `count` seeded random bumps. Aborts with
/// InequalityViolation (diagnostic includes seeds and partial integrals) at
/// the first quotient below C by more than three standard errors.
std::vector<BatteryRow> inequality_battery(const HardyProblem& p, int count, std::uint64_t seed,
                                           const QuadratureConfig& cfg);

}  // namespace carnot
