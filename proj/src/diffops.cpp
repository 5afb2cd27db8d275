#include "carnot/diffops.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "carnot/random.hpp"

namespace carnot {

namespace {

bool is_step_two_gauge(const GroupSpec& g) {
  return g.norm_kind() == NormKind::heisenberg_rho || g.norm_kind() == NormKind::htype_K;
}

void require_step_two_gauge(const GroupSpec& g, const char* what) {
  if (!is_step_two_gauge(g)) {
    throw InvalidArgument(std::string(what) + " needs a Heisenberg or H-type group with its built-in norm");
  }
}

/// X_j X_l phi.
double second_horizontal(const Matrix& c, const GroupSpec& g, int j, int l, const Jet2& phi, const Point& x) {
  const Vector cj = c.row(j).transpose();
  const Vector cl = c.row(l).transpose();
  const Matrix dl = g.frame_jacobian(l, x);
  return cj.dot(phi.hessian * cl) + phi.gradient.dot(dl * cj);
}

double relative_to(double residual, double scale) {
  return scale > 0.0 ? residual / scale : residual;
}

}  // namespace

Vector horizontal_gradient(const GroupSpec& g, const ScalarField& phi, const Point& x) {
  g.check_point(x);
  return horizontal_gradient(g, phi.jet1(x), x);
}

double sub_laplacian(const GroupSpec& g, const Jet2& phi, const Point& x) {
  g.check_point(x);
  const Matrix c = g.frame_matrix(x);
  double sum = 0.0;
  for (int j = 0; j < g.horizontal_dim(); ++j) sum += second_horizontal(c, g, j, j, phi, x);
  return sum;
}

double sub_laplacian(const GroupSpec& g, const ScalarField& phi, const Point& x) {
  g.check_point(x);
  return sub_laplacian(g, phi.jet2(x), x);
}

double commutator(const GroupSpec& g, int j, int l, const Jet2& phi, const Point& x) {
  g.check_point(x);
  const int m = g.horizontal_dim();
  if (j < 0 || l < 0 || j >= m || l >= m) throw InvalidArgument("frame index out of range");
  const Matrix c = g.frame_matrix(x);
  return second_horizontal(c, g, j, l, phi, x) - second_horizontal(c, g, l, j, phi, x);
}

double delta_norm_power(const GroupSpec& g, double s, const Point& x) {
  require_step_two_gauge(g, "delta_norm_power");
  g.check_point(x);
  const double n = homogeneous_norm(g, x);
  if (n == 0.0) throw DomainError("delta_norm_power evaluated at the origin");
  const double q = g.homogeneous_dimension();
  return s * (s + q - 2.0) * g.v(x).squaredNorm() * std::pow(n, s - 4.0);
}

RadialDerivatives radial_apply(const GroupSpec& g, const RadialProfile& f, const Point& x) {
  require_step_two_gauge(g, "radial_apply");
  g.check_point(x);
  const double n = homogeneous_norm(g, x);
  if (n == 0.0) throw DomainError("radial_apply evaluated at the origin");
  if (!f.contains(n)) throw DomainError("norm outside radial profile support");
  const double w = g.v(x).squaredNorm() / (n * n);
  const double d1 = f.df(n);
  const double q = g.homogeneous_dimension();
  return {w * d1 * d1, w * (f.d2f(n) + (q - 1.0) / n * d1)};
}

double expand_gradient_identity(const GroupSpec& g, double beta, const ScalarField& psi, const Point& x) {
  g.check_point(x);
  const Jet1 n = norm_jet<1>(g, x);
  const Jet1 p = psi.jet1(x);
  const Matrix c = g.frame_matrix(x);
  const Vector lhs_grad = c * (pow(n, beta) * p).gradient;
  const Vector gn = c * n.gradient;
  const Vector gp = c * p.gradient;
  const double lhs = lhs_grad.squaredNorm();
  const double rhs = beta * beta * std::pow(n.value, 2.0 * beta - 2.0) * gn.squaredNorm() * p.value * p.value +
                     2.0 * beta * std::pow(n.value, 2.0 * beta - 1.0) * p.value * gn.dot(gp) +
                     std::pow(n.value, 2.0 * beta) * gp.squaredNorm();
  return std::abs(lhs - rhs);
}

Point random_annulus_point(const GroupSpec& g, std::uint64_t seed, std::uint64_t index, double r_lo, double r_hi) {
  if (!(r_lo > 0.0 && r_hi > r_lo)) throw InvalidArgument("annulus radii must satisfy 0 < r_lo < r_hi");
  const CounterRng rng(seed);
  const int n = g.dim();
  Point u(n);
  for (std::uint64_t attempt = 0;; ++attempt) {
    for (int i = 0; i < n; ++i) u[i] = rng.uniform(index, attempt * kMaxDim + i, -1.0, 1.0);
    if (u.norm() > 1e-3) break;
  }
  const double target = std::exp(rng.uniform(index, 1u << 20, std::log(r_lo), std::log(r_hi)));
  return dilate(g, target / homogeneous_norm(g, u), u);
}

std::vector<IdentityCheck> identity_battery(const GroupSpec& g, const IdentityBatteryOptions& options) {
  if (options.samples < 1) throw InvalidArgument("identity battery needs at least one sample");
  const int n = g.dim();
  const int m = g.horizontal_dim();
  const double q = g.homogeneous_dimension();
  const bool gauge = is_step_two_gauge(g);
  const bool harmonic_norm = q >= 3 && g.norm_kind() != NormKind::user_supplied;
  const CounterRng rng(options.seed ^ 0x51ed270b27cbd8d5ULL);

  // psi = 1.5 + cos(<a, x> + b); quadratic test field phi = x^T A x / 2 + <b, x>.
  Vector a(n), lin(n);
  Matrix quad(n, n);
  for (int i = 0; i < n; ++i) {
    a[i] = rng.uniform(0, i, -1.0, 1.0);
    lin[i] = rng.uniform(1, i, -1.0, 1.0);
    for (int j = 0; j <= i; ++j) quad(i, j) = quad(j, i) = rng.uniform(2, i * kMaxDim + j, -1.0, 1.0);
  }
  const double b0 = rng.uniform(3, 0, 0.0, 6.283185307179586);
  const auto psi = ScalarField::from_generic([a, b0](const auto& v, Eigen::Index dim) {
    auto s = a[0] * v[0];
    for (Eigen::Index i = 1; i < dim; ++i) s = s + a[i] * v[i];
    return 1.5 + cos(s + b0);
  });

  const std::array<double, 6> powers = {-2.0, -1.0, 1.0, 2.0, 2.0 - q, 3.7};
  const std::array<RadialProfile, 4> profiles = {
      RadialProfile{[](double r) { return r * r; }, [](double r) { return 2.0 * r; }, [](double) { return 2.0; }},
      RadialProfile{[](double r) { return std::pow(r, -1.5); }, [](double r) { return -1.5 * std::pow(r, -2.5); },
                    [](double r) { return 3.75 * std::pow(r, -3.5); }},
      RadialProfile{[q](double r) { return std::pow(r, 2.0 - q); },
                    [q](double r) { return (2.0 - q) * std::pow(r, 1.0 - q); },
                    [q](double r) { return (2.0 - q) * (1.0 - q) * std::pow(r, -q); }},
      RadialProfile{[](double r) { return 0.7 + r - 0.3 * r * r * r; },
                    [](double r) { return 1.0 - 0.9 * r * r; }, [](double r) { return -1.8 * r; }},
  };

  IdentityCheck expansion{"gradient_expansion", 0.0, 1e-10};
  IdentityCheck grad_norm{"grad_norm_sq", 0.0, 1e-10};
  IdentityCheck power{"norm_power_laplacian", 0.0, 1e-8};
  IdentityCheck radial{"radial_formulas", 0.0, 1e-8};
  IdentityCheck weighted{"weighted_power_identity", 0.0, 1e-8};
  IdentityCheck harmonic{"harmonicity", 0.0, 1e-8};
  IdentityCheck brackets{"commutators", 0.0, 1e-10};

  for (int k = 0; k < options.samples; ++k) {
    const auto idx = static_cast<std::uint64_t>(k);
    const Point x = random_annulus_point(g, options.seed, idx, options.r_lo, options.r_hi);
    const Matrix c = g.frame_matrix(x);
    const Jet2 nj = norm_jet<2>(g, x);
    const double nv = nj.value;
    const Vector gn = c * nj.gradient;
    const double v2 = gauge ? g.v(x).squaredNorm() : 0.0;

    {
      const double beta = rng.uniform(idx, 101, -3.0, 3.0);
      const Jet1 p = psi.jet1(x);
      const Vector gp = c * p.gradient;
      const double scale = beta * beta * std::pow(nv, 2 * beta - 2) * gn.squaredNorm() * p.value * p.value +
                           std::abs(2 * beta * std::pow(nv, 2 * beta - 1) * p.value * gn.dot(gp)) +
                           std::pow(nv, 2 * beta) * gp.squaredNorm();
      expansion.max_residual =
          std::max(expansion.max_residual, relative_to(expand_gradient_identity(g, beta, psi, x), scale));
      ++expansion.samples;
    }

    if (gauge || g.norm_kind() == NormKind::euclidean) {
      const double expected = gauge ? v2 / (nv * nv) : 1.0;
      grad_norm.max_residual =
          std::max(grad_norm.max_residual, std::abs(gn.squaredNorm() - expected) / std::max(expected, 1e-300));
      ++grad_norm.samples;
    }

    if (gauge) {
      for (double s : powers) {
        const double jet_value = sub_laplacian(g, pow(nj, s), x);
        const double closed = delta_norm_power(g, s, x);
        const double scale = std::abs(s) * (std::abs(s) + q) * std::pow(nv, s - 2.0);
        power.max_residual = std::max(power.max_residual, relative_to(std::abs(jet_value - closed), scale));
        ++power.samples;
      }
      for (const auto& f : profiles) {
        const auto closed = radial_apply(g, f, x);
        const Jet2 u = compose(nj, f.f(nv), f.df(nv), f.d2f(nv));
        const double gsq = (c * u.gradient).squaredNorm();
        const double lap = sub_laplacian(g, u, x);
        const double d1 = std::abs(f.df(nv));
        const double gscale = d1 * d1;
        const double lscale = std::abs(f.d2f(nv)) + (q - 1.0) / nv * d1;
        radial.max_residual = std::max(radial.max_residual, relative_to(std::abs(gsq - closed.grad_sq), gscale));
        radial.max_residual = std::max(radial.max_residual, relative_to(std::abs(lap - closed.laplacian), lscale));
        ++radial.samples;
      }
    }

    if (harmonic_norm) {
      const double alpha = rng.uniform(idx, 102, -1.0, 2.0);
      double beta = rng.uniform(idx, 103, -3.0, 3.0);
      if (std::abs(alpha + 2.0 * beta) < 0.05) beta += 0.5;
      const double s = alpha + 2.0 * beta;
      const double lhs = -(beta / s) * sub_laplacian(g, pow(nj, s), x);
      const double rhs = -beta * (s + q - 2.0) * std::pow(nv, s - 2.0) * gn.squaredNorm();
      const double scale = std::abs(beta) * (std::abs(s) + q) * std::pow(nv, s - 2.0);
      weighted.max_residual = std::max(weighted.max_residual, relative_to(std::abs(lhs - rhs), scale));
      ++weighted.samples;

      const double lap = sub_laplacian(g, pow(nj, 2.0 - q), x);
      harmonic.max_residual = std::max(harmonic.max_residual, std::abs(lap) * std::pow(nv, q));
      ++harmonic.samples;
    }

    {
      Jet2 phi;
      phi.value = 0.5 * x.dot(quad * x) + lin.dot(x);
      phi.gradient = quad * x + lin;
      phi.hessian = quad;
      for (int j = 0; j < m; ++j) {
        for (int l = j + 1; l < m; ++l) {
          double expected = 0.0;
          if (g.kind() == GroupKind::heisenberg) {
            const int hn = g.heisenberg_order();
            if (l == j + hn) expected = -4.0 * phi.gradient[2 * hn];
          } else if (g.kind() == GroupKind::htype) {
            const auto& s = *g.htype_structure();
            for (int i = 0; i < s.k(); ++i) expected -= s.J[i](j, l) * phi.gradient[m + i];
          } else if (g.kind() == GroupKind::custom) {
            continue;
          }
          brackets.max_residual = std::max(brackets.max_residual, std::abs(commutator(g, j, l, phi, x) - expected));
        }
      }
      ++brackets.samples;
    }
  }

  std::vector<IdentityCheck> out;
  for (auto* check : {&expansion, &grad_norm, &power, &radial, &weighted, &harmonic, &brackets}) {
    if (check->samples == 0) continue;
    check->passed = check->max_residual <= check->threshold;
    out.push_back(*check);
  }
  return out;
}

}  // namespace carnot
