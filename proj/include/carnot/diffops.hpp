#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "carnot/field.hpp"
#include "carnot/group.hpp"

namespace carnot {

/// (X_1 phi, ..., X_m phi) from an ambient jet; exact up to rounding.
template <int O>
Vector horizontal_gradient(const GroupSpec& g, const Jet<O>& phi, const Point& x) {
  return g.frame_matrix(x) * phi.gradient;
}

Vector horizontal_gradient(const GroupSpec& g, const ScalarField& phi, const Point& x);

/// sum_j X_j X_j phi, using the symbolic derivatives of the frame coefficients.
double sub_laplacian(const GroupSpec& g, const Jet2& phi, const Point& x);
double sub_laplacian(const GroupSpec& g, const ScalarField& phi, const Point& x);

/// X_j X_l phi - X_l X_j phi.
double commutator(const GroupSpec& g, int j, int l, const Jet2& phi, const Point& x);

/// Closed form s (s + Q - 2) |v|^2 N^{s-4} of the sub-Laplacian of N^s on
/// Heisenberg and H-type groups (|v| is |z| in Heisenberg notation).
double delta_norm_power(const GroupSpec& g, double s, const Point& x);

struct RadialDerivatives {
  double grad_sq = 0.0;
  double laplacian = 0.0;
};

/// Closed forms of |grad u|^2 and Delta u for u = f(N) on Heisenberg and
/// H-type groups. Throws DomainError when N(x) is outside the profile support.
RadialDerivatives radial_apply(const GroupSpec& g, const RadialProfile& f, const Point& x);

/// Jet of f(N) for a radial profile f.
template <int O>
Jet<O> radial_jet(const GroupSpec& g, const RadialProfile& f, const Point& x) {
  const auto n = norm_jet<O>(g, x);
  if (!f.contains(n.value)) throw DomainError("norm outside radial profile support");
  return compose(n, f.f(n.value), f.df(n.value), f.d2f(n.value));
}

/// |LHS - RHS| of the expansion of |grad(N^beta psi)|^2 into its three terms.
/// LHS differentiates the product jet; RHS is assembled from the jets of N and psi.
double expand_gradient_identity(const GroupSpec& g, double beta, const ScalarField& psi, const Point& x);

/// Random point with N(x) log-uniform in [r_lo, r_hi], for identity batteries.
Point random_annulus_point(const GroupSpec& g, std::uint64_t seed, std::uint64_t index, double r_lo = 0.1,
                           double r_hi = 10.0);

struct IdentityCheck {
  std::string name;
  double max_residual = 0.0;
  double threshold = 0.0;
  int samples = 0;
  bool passed = true;
};

struct IdentityBatteryOptions {
  int samples = 1000;
  std::uint64_t seed = 1;
  double r_lo = 0.1;
  double r_hi = 10.0;
};

/// Runs every pointwise identity that applies to the group: the gradient
/// expansion, |grad N|^2 = |v|^2 / N^2, the power and radial formulas, the
/// harmonicity of N^{2-Q}, the weighted power identity, and the bracket
/// relations. Residuals are relative to the natural scale of each identity.
std::vector<IdentityCheck> identity_battery(const GroupSpec& g, const IdentityBatteryOptions& options = {});

}  // namespace carnot
