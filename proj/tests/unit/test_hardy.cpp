#include <doctest.h>

#include <cmath>
#include <numbers>

#include "carnot/diffops.hpp"
#include "carnot/hardy.hpp"
#include "support.hpp"

using namespace carnot;

namespace {

constexpr double kPi = std::numbers::pi;

QuadratureConfig mc(std::uint64_t budget, std::uint64_t seed = 1) {
  QuadratureConfig c;
  c.budget = budget;
  c.seed = seed;
  return c;
}

Point pt(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

// (|z|^2 + t^2)^{1/2}
ScalarField quadratic_mixed() {
  return ScalarField::from_generic(
      [](const auto& v, Eigen::Index n) {
        auto s = v[0] * v[0];
        for (Eigen::Index i = 1; i < n; ++i) s = s + v[i] * v[i];
        return sqrt(s);
      },
      Smoothness::away_from_origin);
}

// (|z|^4 + c t^2)^{1/4} on H^1.
ScalarField heisenberg_gauge(double c) {
  return ScalarField::from_generic(
      [c](const auto& v, Eigen::Index) {
        const auto z2 = v[0] * v[0] + v[1] * v[1];
        return pow(z2 * z2 + c * v[2] * v[2], 0.25);
      },
      Smoothness::away_from_origin);
}

}  // namespace

TEST_SUITE("hardy") {
  TEST_CASE("sharp constants") {
    CHECK(sharp_constant(4, 0) == 1.0);
    CHECK(sharp_constant(3, 0) == 0.25);
    CHECK(sharp_constant(10, 2) == 25.0);
    CHECK(sharp_constant(10, 0) == 16.0);
    CHECK(sharp_constant(4, 1) == 2.25);
    CHECK_THROWS_AS(sharp_constant(2, 0), InvalidArgument);
    CHECK_THROWS_AS(sharp_constant(4, -3), InvalidArgument);
  }

  TEST_CASE("optimal exponent maximises the quadratic") {
    CHECK(optimal_beta(4, 0) == -1.0);
    CHECK(optimal_beta(3, 1) == -1.0);
    for (std::uint64_t k = 0; k < 100; ++k) {
      const Point r = test::uniform_point(2, 3, k, 0.0, 10.0);
      const double q = 3 + r[0], a = r[1] - 2;
      if (q + a - 2 <= 0) continue;
      const double b = optimal_beta(q, a);
      const double value = -b * b - b * (a + q - 2);
      CHECK(value == doctest::Approx(sharp_constant(q, a)).epsilon(1e-12));
      CHECK(value >= -(b + 0.01) * (b + 0.01) - (b + 0.01) * (a + q - 2));
    }
  }

  TEST_CASE("Hardy problem weight and potential") {
    const HardyProblem p(builtin_group("h1"), 1.5);
    CHECK(p.sharp_constant() == doctest::Approx(std::pow(1.75, 2)));
    for (std::uint64_t k = 0; k < 100; ++k) {
      const Point x = random_annulus_point(p.group(), 4, k);
      const double rho = homogeneous_norm(p.group(), x);
      const double z2 = x[0] * x[0] + x[1] * x[1];
      CHECK(test::relative_error(p.potential(x), std::pow(rho, 1.5) * z2 / std::pow(rho, 4)) < 1e-12);
      CHECK(p.weight(x) == doctest::Approx(std::pow(rho, 1.5)));
    }
    const HardyProblem qh(builtin_group("quaternionic-h1"), 0.0);
    const Point y = random_annulus_point(qh.group(), 5, 0);
    const double k = homogeneous_norm(qh.group(), y);
    CHECK(test::relative_error(qh.potential(y), y.head(4).squaredNorm() / std::pow(k, 4)) < 1e-12);
    CHECK_THROWS_AS(HardyProblem(builtin_group("h1"), -2.0), InvalidArgument);
    CHECK_THROWS_AS(HardyProblem(builtin_group("abelian-2"), 0.0), InvalidArgument);
  }

  TEST_CASE("radial quotient of the log-sine profile") {
    const HardyProblem p(builtin_group("h1"), 0.0);
    const auto phi = TestFunction::log_sine(-1.0, 1.0, std::log(100.0));
    const auto r = rayleigh_quotient(p, phi, QuadratureConfig{}, QuotientMethod::radial_1d);
    CHECK(r.quotient == doctest::Approx(1.4653807).epsilon(1e-6));
    CHECK(r.quotient == doctest::Approx(r.numerator.value / r.denominator.value).epsilon(1e-15));
    CHECK(r.relative_gap == doctest::Approx(r.quotient - 1.0));
    CHECK(r.satisfies_bound());
    CHECK_THROWS_AS(rayleigh_quotient(p, TestFunction::gauge_bump(1.0), QuadratureConfig{}, QuotientMethod::radial_1d),
                    InvalidArgument);
  }

  TEST_CASE("test-function jets agree with finite differences") {
    const auto g = builtin_group("h1");
    const Bump b = random_bump(g, 9, 2);
    const std::vector<TestFunction> fns = {TestFunction::bump(b), TestFunction::log_sine(-0.5, 0.6, 1.5),
                                           TestFunction::gauge_bump(1.3), TestFunction::bump(b).dilated(1.4)};
    for (const auto& phi : fns) {
      const auto f = [&](const Point& x) { return phi.jet<2>(g, x).value; };
      int interior = 0;
      for (std::uint64_t k = 0; k < 400 && interior < 10; ++k) {
        const auto box = phi.support(g);
        const Point u = test::uniform_point(3, 17, k, 0.0, 1.0);
        const Point x = box.lo() + (box.hi() - box.lo()).cwiseProduct(u);
        const Jet2 j = phi.jet<2>(g, x);
        if (j.value == 0.0) continue;
        ++interior;
        const auto fd = test::finite_difference(f, x, 1e-5);
        CHECK((j.gradient - fd.gradient).norm() <= 1e-5 * (1 + j.gradient.norm()));
        CHECK((j.hessian - fd.hessian).norm() <= 1e-3 * (1 + j.hessian.norm()));
      }
      CHECK(interior > 0);
    }
  }

  TEST_CASE("gauge bump is one at the origin") {
    const auto g = builtin_group("h2");
    CHECK(TestFunction::gauge_bump(2.0).jet<2>(g, Point::Zero(5)).value == doctest::Approx(1.0));
    CHECK(TestFunction::gauge_bump(2.0).dilated(3.0).jet<1>(g, Point::Zero(5)).value == doctest::Approx(1.0));
  }

  TEST_CASE("random bumps are reproducible and stay off the origin") {
    for (const char* name : test::kBuiltins) {
      const auto g = builtin_group(name);
      for (std::uint64_t k = 0; k < 50; ++k) {
        const Bump b = random_bump(g, 1, k);
        const Bump c = random_bump(g, 1, k);
        CHECK(b.center == c.center);
        CHECK(b.radii == c.radii);
        const double nc = homogeneous_norm(g, b.center);
        CHECK(nc >= 0.2 * (1 - 1e-12));
        CHECK(nc <= 5.0 * (1 + 1e-12));
        CHECK(b.center.cwiseQuotient(b.radii).squaredNorm() > 1.0);
        CHECK(TestFunction::bump(b).jet<1>(g, Point::Zero(g.dim())).value == 0.0);
      }
    }
    CHECK_THROWS_AS(TestFunction::bump(Bump{pt({1, 0}), pt({1}), pt({0, 0})}), InvalidArgument);
  }

  TEST_CASE("sharpness sweep on H^1") {
    const HardyProblem p(builtin_group("h1"), 0.0);
    const auto s = sharpness_sweep(p, decade_grid(6));
    REQUIRE(s.rows.size() == 6);
    for (std::size_t i = 0; i < s.rows.size(); ++i) {
      const auto& row = s.rows[i];
      CHECK(row.L == doctest::Approx(static_cast<double>(i + 1) * std::log(10.0)));
      CHECK(row.deviation <= 5e-3 * row.predicted);
      if (i > 0) CHECK(row.quotient <= s.rows[i - 1].quotient);
      CHECK(row.quotient > 1.0);
    }
    CHECK(s.gap_slope == doctest::Approx(-2.0).epsilon(0.05));
    CHECK_THROWS_AS(sharpness_sweep(p, {2.0, 1.0}), InvalidArgument);
    CHECK_THROWS_AS(sharpness_sweep(p, {}), InvalidArgument);
  }

  TEST_CASE("sweep in the small-constant regime") {
    const double eps = 0.1;
    const HardyProblem p(builtin_group("h1"), 2 - 4 + eps);
    CHECK(p.sharp_constant() == doctest::Approx(eps * eps / 4));
    const auto s = sharpness_sweep(p, decade_grid(6));
    for (const auto& row : s.rows) CHECK(row.deviation <= 5e-3 * row.predicted);
    CHECK(s.rows.back().quotient - p.sharp_constant() < 0.06);
  }

  TEST_CASE("radial quotient is dilation invariant") {
    const HardyProblem p(builtin_group("h1"), 1.0);
    const auto phi = TestFunction::log_sine(optimal_beta(4, 1), 1.0, 1.2);
    const auto base = rayleigh_quotient(p, phi, QuadratureConfig{}, QuotientMethod::radial_1d);
    for (double lambda : {0.5, 2.0}) {
      const auto r = rayleigh_quotient(p, phi.dilated(lambda), QuadratureConfig{}, QuotientMethod::radial_1d);
      CHECK(r.quotient == doctest::Approx(base.quotient).epsilon(1e-12));
      // numerator and denominator both scale by lambda^{2 - alpha - Q}
      CHECK(r.numerator.value == doctest::Approx(base.numerator.value * std::pow(lambda, 2 - 1 - 4)).epsilon(1e-12));
    }
    std::vector<HardyReport> full;
    for (double lambda : {0.5, 1.0, 2.0}) {
      full.push_back(rayleigh_quotient(p, phi.dilated(lambda), mc(200000, 3), QuotientMethod::full_dim));
    }
    for (std::size_t i = 1; i < full.size(); ++i) {
      CHECK(std::abs(full[i].quotient - full[0].quotient) <=
            3 * std::hypot(full[i].quotient_error, full[0].quotient_error));
    }
  }

  TEST_CASE("full-dimensional and radial quotients agree") {
    const HardyProblem p(builtin_group("h1"), 0.0);
    const auto phi = TestFunction::log_sine(-1.0, 0.8, 1.0);
    const auto radial = rayleigh_quotient(p, phi, QuadratureConfig{}, QuotientMethod::radial_1d);
    const auto full = rayleigh_quotient(p, phi, mc(400000, 5), QuotientMethod::full_dim);
    CHECK(std::abs(full.quotient - radial.quotient) <= 3 * full.quotient_error);
    CHECK(full.numerator.evals <= 400000);
  }

  TEST_CASE("random bumps satisfy the abelian inequality") {
    const HardyProblem p(builtin_group("abelian-3"), 0.0);
    const auto rows = inequality_battery(p, 10, 4, mc(50000));
    REQUIRE(rows.size() == 10);
    for (const auto& r : rows) {
      CHECK(r.report.quotient >= 0.25 - 3 * r.report.quotient_error);
      CHECK(r.report.method == QuotientMethod::full_dim);
    }
    CHECK(inequality_battery(p, 0, 4, mc(50000)).empty());
  }

  TEST_CASE("degenerate test functions are rejected") {
    const auto g = builtin_group("h1");
    const HardyProblem p(g, 0.0);
    const ScalarField zero([](const Point& x) { return Jet2::constant(0.0, x.size()); });
    const auto phi = TestFunction::general(zero, pt({0.5, 0.5, 0.5}), pt({1, 1, 1}));
    CHECK_THROWS_AS(rayleigh_quotient(p, phi, mc(10000), QuotientMethod::full_dim), DegenerateTestFunction);
  }

  TEST_CASE("uncertainty principle") {
    const auto g = builtin_group("h1");
    const ScalarField zero([](const Point& x) { return Jet2::constant(0.0, x.size()); });
    const auto z = uncertainty_check(g, TestFunction::general(zero, pt({0.5, 0.5, 0.5}), pt({1, 1, 1})), mc(10000));
    CHECK(z.lhs == 0.0);
    CHECK(z.rhs == 0.0);
    CHECK(z.ok);
    for (std::uint64_t k = 0; k < 5; ++k) {
      const auto phi = TestFunction::bump(random_bump(g, 2, k));
      const auto u = uncertainty_check(g, phi, mc(100000, k + 1));
      CHECK(u.ok);
      CHECK(u.lhs >= u.rhs);
      // Both sides pick up lambda^{2 (2 - Q)} under phi -> phi o delta_lambda; the ratio is invariant.
      const auto d = uncertainty_check(g, phi.dilated(1.7), mc(100000, k + 1));
      CHECK(d.ok);
      CHECK(std::abs(d.lhs / d.rhs - u.lhs / u.rhs) <= 3 * (u.lhs / u.rhs) *
                                                           (std::hypot(u.lhs_error / u.lhs, u.rhs_error / u.rhs) +
                                                            std::hypot(d.lhs_error / d.lhs, d.rhs_error / d.rhs)));
    }
    CHECK_THROWS_AS(uncertainty_check(builtin_group("abelian-2"), TestFunction::gauge_bump(1.0), mc(10000)),
                    InvalidArgument);
  }

  TEST_CASE("norm certification") {
    const auto g = builtin_group("h1");
    const auto good = certify_norm(g, norm_field(g));
    CHECK(good.passed());
    CHECK(good.samples == 1000);
    const auto mixed = certify_norm(g, quadratic_mixed());
    CHECK_FALSE(mixed.homogeneity_ok);
    CHECK(mixed.symmetry_ok);
    const auto scaled = certify_norm(g, heisenberg_gauge(4.0));
    CHECK(scaled.homogeneity_ok);
    CHECK(scaled.symmetry_ok);
    CHECK(scaled.positivity_ok);
    CHECK_FALSE(scaled.harmonicity_ok);
    CHECK(scaled.harmonicity >= 10 * 1e-6);
    const auto q = builtin_group("quaternionic-h1");
    CHECK(certify_norm(q, norm_field(q)).passed());
    const ScalarField nan_norm([](const Point& x) { return Jet2::constant(std::nan(""), x.size()); });
    CHECK_THROWS_AS(certify_norm(g, nan_norm), NonFiniteSample);
    const ScalarField negative([](const Point& x) { return Jet2::constant(-1.0, x.size()); });
    CHECK_FALSE(certify_norm(g, negative).positivity_ok);
  }

  TEST_CASE("pairing against the fundamental solution is linear and vanishes off the pole") {
    const auto g = builtin_group("h1");
    const auto phi = TestFunction::gauge_bump(1.0);
    const auto cfg = mc(200000, 8);
    const auto one = dirac_normalization(g, phi, cfg, 1.0);
    const auto two = dirac_normalization(g, phi, cfg, 2.0);
    CHECK(two.value == doctest::Approx(2 * one.value).epsilon(1e-14));
    const auto off = dirac_normalization(g, TestFunction::bump(random_bump(g, 3, 0)), cfg);
    CHECK(std::abs(off.value) <= 3 * off.error_estimate);
    // With c = 1 the pairing is 1 / c*, the reciprocal of the flux constant.
    const auto flux = flux_normalization(g, mc(400000, 9));
    CHECK(std::abs(one.value * flux.value - 1.0) <= 3 * (one.error_estimate / one.value + flux.error_estimate / flux.value));
  }

  TEST_CASE("flux normalisation on H^1") {
    // int_{rho < 1} |z|^2 / rho^2 dx = pi, so c = 1 / ((Q - 2) Q pi) = 1 / (8 pi).
    const auto r = flux_normalization(builtin_group("h1"), mc(1000000, 10));
    CHECK(std::abs(r.value - 1.0 / (8 * kPi)) <= 3 * r.error_estimate);
  }
}
