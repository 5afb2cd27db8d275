#include <doctest.h>

#include <cmath>
#include <numbers>

#include <boost/math/special_functions/gamma.hpp>

#include "carnot/group.hpp"
#include "carnot/quadrature.hpp"
#include "support.hpp"

using namespace carnot;

namespace {

Point pt(std::initializer_list<double> v) {
  Point x(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double c : v) x[i++] = c;
  return x;
}

// The Heisenberg group H^1 rebuilt from its frame polynomials alone.
GroupSpec custom_h1(bool with_law) {
  HorizontalField X, Y;
  X.coefficients.push_back({2, Polynomial::variable(3, 1, 2.0)});
  Y.coefficients.push_back({2, Polynomial::variable(3, 0, -2.0)});
  std::vector<Polynomial> law;
  if (with_law) {
    Polynomial zero(6), t(6);
    t.add_term(2.0, {0, 1, 0, 1, 0, 0});   // 2 y x'
    t.add_term(-2.0, {1, 0, 0, 0, 1, 0});  // -2 x y'
    law = {zero, zero, t};
  }
  return GroupSpec::custom("custom-h1", {2, 1}, {X, Y}, law);
}

}  // namespace

TEST_SUITE("groups") {
  TEST_CASE("Heisenberg product examples") {
    const auto g = builtin_group("h1");
    const Point a = pt({0.3, -1.2, 0.7});
    CHECK(multiply(g, Point::Zero(3), a) == a);
    CHECK(multiply(g, pt({1, 0, 5}), pt({-1, 0, -5})).isZero(0.0));
    CHECK(multiply(g, pt({1, 0, 0}), pt({0, 1, 0})) == pt({1, 1, -2}));
    CHECK(inverse(g, a) == -a);
    CHECK_THROWS_AS(multiply(g, pt({1, 0}), a), InvalidArgument);
  }

  TEST_CASE("dilations") {
    const auto g = builtin_group("h1");
    CHECK(dilate(g, 2.0, pt({1, 1, 1})) == pt({2, 2, 4}));
    CHECK(dilate(g, 1.0, pt({0.1, 0.2, 0.3})) == pt({0.1, 0.2, 0.3}));
    CHECK_THROWS_AS(dilate(g, 0.0, pt({1, 1, 1})), InvalidArgument);
    CHECK_THROWS_AS(dilate(g, -1.0, pt({1, 1, 1})), InvalidArgument);
    for (const char* name : test::kBuiltins) {
      const auto h = builtin_group(name);
      const Point x = test::uniform_point(h.dim(), 5, 0);
      CHECK((dilate(h, 0.7, dilate(h, 1.9, x)) - dilate(h, 0.7 * 1.9, x)).norm() < 1e-12);
    }
  }

  TEST_CASE("structure of the built-in groups") {
    const auto h2 = builtin_group("h2");
    CHECK(h2.dim() == 5);
    CHECK(h2.horizontal_dim() == 4);
    CHECK(h2.step() == 2);
    CHECK(h2.homogeneous_dimension() == 6);
    CHECK(h2.weights().exponents == std::vector<int>{1, 1, 1, 1, 2});
    const auto q = builtin_group("quaternionic-h1");
    CHECK(q.dim() == 7);
    CHECK(q.homogeneous_dimension() == 10);
    CHECK(q.norm_kind() == NormKind::htype_K);
    const auto a = builtin_group("abelian-5");
    CHECK(a.homogeneous_dimension() == 5);
    CHECK(a.step() == 1);
    CHECK_THROWS_AS(builtin_group("h9x"), InvalidArgument);
    CHECK_THROWS_AS(builtin_group("abelian-"), InvalidArgument);
  }

  TEST_CASE("frame reduces to coordinate derivatives at the origin") {
    for (const char* name : test::kBuiltins) {
      const auto g = builtin_group(name);
      const Matrix c = g.frame_matrix(Point::Zero(g.dim()));
      CHECK((c - Matrix::Identity(g.horizontal_dim(), g.dim())).norm() == 0.0);
    }
  }

  TEST_CASE("frame coefficients are homogeneous of degree w_i - w_j") {
    for (const char* name : test::kBuiltins) {
      const auto g = builtin_group(name);
      const auto& w = g.weights().exponents;
      for (std::uint64_t k = 0; k < 50; ++k) {
        const Point x = test::uniform_point(g.dim(), 9, k);
        const double lambda = 0.3 + 0.05 * static_cast<double>(k);
        const Matrix a = g.frame_matrix(x);
        const Matrix b = g.frame_matrix(dilate(g, lambda, x));
        for (int j = 0; j < g.horizontal_dim(); ++j) {
          for (int i = 0; i < g.dim(); ++i) {
            CHECK(std::abs(b(j, i) - std::pow(lambda, w[i] - w[j]) * a(j, i)) <= 1e-12 * (1 + std::abs(b(j, i))));
          }
        }
      }
    }
  }

  TEST_CASE("group axioms and dilation automorphism on random triples") {
    for (const char* name : test::kBuiltins) {
      const auto g = builtin_group(name);
      double assoc = 0, inv = 0, auto_err = 0;
      for (std::uint64_t k = 0; k < 1000; ++k) {
        const Point x = test::uniform_point(g.dim(), 21, k);
        const Point y = test::uniform_point(g.dim(), 22, k);
        const Point z = test::uniform_point(g.dim(), 23, k);
        assoc = std::max(assoc, (multiply(g, multiply(g, x, y), z) - multiply(g, x, multiply(g, y, z))).norm());
        inv = std::max(inv, multiply(g, x, inverse(g, x)).norm());
        inv = std::max(inv, (multiply(g, Point::Zero(g.dim()), x) - x).norm());
        const double lambda = 0.25 + 0.003 * static_cast<double>(k);
        auto_err = std::max(auto_err, (dilate(g, lambda, multiply(g, x, y)) -
                                       multiply(g, dilate(g, lambda, x), dilate(g, lambda, y)))
                                          .norm());
      }
      CHECK(assoc <= 1e-12);
      CHECK(inv <= 1e-12);
      CHECK(auto_err <= 1e-12);
    }
  }

  TEST_CASE("norm examples") {
    const auto h1 = builtin_group("h1");
    CHECK(homogeneous_norm(h1, pt({0, 0, 1})) == doctest::Approx(1.0));
    CHECK(homogeneous_norm(h1, pt({1, 0, 1})) == doctest::Approx(std::pow(2.0, 0.25)).epsilon(1e-15));
    CHECK(homogeneous_norm(h1, Point::Zero(3)) == 0.0);
    const auto q = builtin_group("quaternionic-h1");
    CHECK(homogeneous_norm(q, pt({0.6, 0, 0.8, 0, 0, 0, 0})) == doctest::Approx(1.0));
    // (|v|^4 + 16 |z|^2)^{1/4} with |v| = 1, |z| = 1/4
    CHECK(homogeneous_norm(q, pt({1, 0, 0, 0, 0, 0.25, 0})) == doctest::Approx(std::pow(2.0, 0.25)));
    CHECK(homogeneous_norm(builtin_group("abelian-3"), pt({1, 2, 2})) == doctest::Approx(3.0));
  }

  TEST_CASE("norm homogeneity and symmetry") {
    for (const char* name : test::kBuiltins) {
      const auto g = builtin_group(name);
      double hom = 0, sym = 0;
      for (std::uint64_t k = 0; k < 1000; ++k) {
        const Point x = test::uniform_point(g.dim(), 31, k);
        const double lambda = std::exp(test::uniform_point(1, 32, k, -3, 3)[0]);
        const double n = homogeneous_norm(g, x);
        hom = std::max(hom, test::relative_error(homogeneous_norm(g, dilate(g, lambda, x)), lambda * n));
        sym = std::max(sym, test::relative_error(homogeneous_norm(g, -x), n));
      }
      CHECK(hom <= 1e-12);
      CHECK(sym <= 1e-12);
    }
  }

  TEST_CASE("norm jets agree with finite differences") {
    for (const char* name : test::kBuiltins) {
      const auto g = builtin_group(name);
      const auto f = [&](const Point& x) { return homogeneous_norm(g, x); };
      for (std::uint64_t k = 0; k < 10; ++k) {
        const Point x = test::uniform_point(g.dim(), 41, k, 0.5, 1.5);
        const Jet2 j = norm_jet<2>(g, x);
        const auto fd = test::finite_difference(f, x);
        CHECK(j.value == doctest::Approx(f(x)).epsilon(1e-15));
        CHECK((j.gradient - fd.gradient).norm() < 1e-7);
        CHECK((j.hessian - fd.hessian).norm() < 1e-4);
        CHECK((norm_jet<1>(g, x).gradient - j.gradient).norm() < 1e-14);
      }
      CHECK_THROWS_AS(norm_jet<2>(g, Point::Zero(g.dim())), DomainError);
    }
  }

  TEST_CASE("gauge jet is the fourth power of the norm and smooth at the origin") {
    for (const char* name : test::kBuiltins) {
      const auto g = builtin_group(name);
      const Point x = test::uniform_point(g.dim(), 43, 0);
      CHECK(gauge_jet<2>(g, x).value == doctest::Approx(std::pow(homogeneous_norm(g, x), 4)));
      const Jet2 o = gauge_jet<2>(g, Point::Zero(g.dim()));
      CHECK(o.value == 0.0);
      CHECK(o.gradient.isZero(0.0));
    }
  }

  TEST_CASE("H-type validation") {
    HTypeStructure rot{{Eigen::MatrixXd(2, 2)}};
    rot.J[0] << 0, 1, -1, 0;
    CHECK(validate_htype(rot, 2, 1).valid);
    HTypeStructure id{{Eigen::MatrixXd::Identity(2, 2)}};
    const auto bad = validate_htype(id, 2, 1);
    CHECK_FALSE(bad.valid);
    CHECK(bad.max_anticommutator_residual > 1.0);
    CHECK_FALSE(bad.violations.empty());
    const auto quat = quaternionic_structure();
    const auto report = validate_htype(quat, 4, 3);
    CHECK(report.valid);
    // Independent oracle: J_z^2 = -|z|^2 Id for a random z.
    const Eigen::Vector3d z(0.3, -1.1, 0.4);
    const Eigen::MatrixXd Jz = z[0] * quat.J[0] + z[1] * quat.J[1] + z[2] * quat.J[2];
    CHECK((Jz * Jz + z.squaredNorm() * Eigen::MatrixXd::Identity(4, 4)).norm() < 1e-14);
    CHECK_THROWS_AS(validate_htype(quat, 4, 2), InvalidArgument);
    CHECK_THROWS_AS(validate_htype(quat, 3, 3), InvalidArgument);
    CHECK_THROWS_AS(GroupSpec::htype("bad", id), InvalidArgument);
  }

  TEST_CASE("Folland constant matches an independent gamma evaluation") {
    // c_Q = 2^{(Q-2)/2} Gamma((Q-2)/4)^2 / pi^{Q/2}; at Q = 4 this is 2 / pi.
    CHECK(folland_constant(4) == doctest::Approx(0.63661977236758134).epsilon(1e-15));
    for (double q : {4.0, 6.0, 8.0, 10.0}) {
      const double oracle = std::pow(2.0, (q - 2) / 2) * std::pow(boost::math::tgamma((q - 2) / 4), 2) /
                            std::pow(std::numbers::pi, q / 2);
      CHECK(folland_constant(q) == doctest::Approx(oracle).epsilon(1e-14));
    }
  }

  TEST_CASE("fundamental solution") {
    const auto h1 = builtin_group("h1");
    CHECK(fundamental_solution(h1, pt({0, 0, 1})) == doctest::Approx(folland_constant(4)));
    CHECK(fundamental_solution(h1, pt({1, 0, 0})) == doctest::Approx(2.0 / std::numbers::pi));
    CHECK_THROWS_AS(fundamental_solution(h1, Point::Zero(3)), DomainError);
    CHECK_THROWS_AS(fundamental_solution(builtin_group("abelian-2"), pt({1, 0})), InvalidArgument);
    for (const char* name : {"h1", "h2", "quaternionic-h1", "abelian-3"}) {
      const auto g = builtin_group(name);
      const Point x = test::uniform_point(g.dim(), 51, 0);
      const double q = g.homogeneous_dimension();
      CHECK(fundamental_solution(g, dilate(g, 1.7, x)) ==
            doctest::Approx(std::pow(1.7, 2 - q) * fundamental_solution(g, x)).epsilon(1e-12));
    }
    CHECK(fundamental_solution_constant(builtin_group("quaternionic-h1")) == 1.0);
  }

  TEST_CASE("custom group from frame polynomials reproduces H^1") {
    const auto c = custom_h1(true);
    const auto h = builtin_group("h1");
    CHECK(c.homogeneous_dimension() == 4);
    CHECK(c.weights().exponents == h.weights().exponents);
    for (std::uint64_t k = 0; k < 20; ++k) {
      const Point x = test::uniform_point(3, 61, k);
      const Point y = test::uniform_point(3, 62, k);
      CHECK((c.frame_matrix(x) - h.frame_matrix(x)).norm() < 1e-15);
      CHECK((multiply(c, x, y) - multiply(h, x, y)).norm() < 1e-14);
      CHECK(c.frame_jacobian(0, x)(2, 1) == 2.0);
      CHECK(c.frame_jacobian(1, x)(2, 0) == -2.0);
    }
    CHECK_THROWS_AS(multiply(custom_h1(false), pt({1, 0, 0}), pt({0, 1, 0})), InvalidArgument);
  }

  TEST_CASE("custom groups reject inconsistent data") {
    // Coefficient y^2 on d_t has weighted degree 2, but 2 - 1 = 1 is required.
    HorizontalField X;
    Polynomial p(3);
    p.add_term(1.0, {0, 2, 0});
    X.coefficients.push_back({2, p});
    HorizontalField Y;
    CHECK_THROWS_AS(GroupSpec::custom("bad", {2, 1}, {X, Y}), InvalidArgument);
    // Coefficient that does not vanish at the origin.
    HorizontalField Z;
    Z.coefficients.push_back({2, Polynomial::constant(3, 1.0)});
    CHECK_THROWS_AS(GroupSpec::custom("bad", {2, 1}, {Z, Y}), InvalidArgument);
    // A horizontal field may not act on another horizontal direction.
    HorizontalField W;
    W.coefficients.push_back({1, Polynomial::variable(3, 0)});
    CHECK_THROWS_AS(GroupSpec::custom("bad", {2, 1}, {W, Y}), InvalidArgument);
    CHECK_THROWS_AS(GroupSpec::custom("bad", {2, 1}, {Y}), InvalidArgument);
    const DilationWeights wrong{{1, 2, 2}};
    CHECK_THROWS_AS(GroupSpec::custom("bad", {2, 1}, {Y, Y}, {}, wrong), InvalidArgument);
  }

  TEST_CASE("dilation weights") {
    const auto w = DilationWeights::from_layers({2, 1});
    CHECK(w.exponents == std::vector<int>{1, 1, 2});
    CHECK(w.homogeneous_dimension() == 4);
    CHECK_NOTHROW(w.validate(2));
    const DilationWeights decreasing{{1, 2, 1}};
    const DilationWeights heavy{{2, 2}};
    CHECK_THROWS_AS(decreasing.validate(1), InvalidArgument);
    CHECK_THROWS_AS(heavy.validate(1), InvalidArgument);
  }

  TEST_CASE("user-supplied norms") {
    const auto h = builtin_group("h1");
    const auto g = h.with_norm(norm_field(h));
    CHECK(g.norm_kind() == NormKind::user_supplied);
    const Point x = pt({0.4, -0.2, 0.9});
    CHECK(homogeneous_norm(g, x) == doctest::Approx(homogeneous_norm(h, x)).epsilon(1e-15));
    CHECK((norm_jet<2>(g, x).hessian - norm_jet<2>(h, x).hessian).norm() < 1e-14);
    CHECK_THROWS_AS(h.with_norm(ScalarField()), InvalidArgument);
  }

  TEST_CASE("ball volume") {
    QuadratureConfig cfg;
    cfg.budget = 400000;
    const auto r = ball_volume(builtin_group("abelian-3"), 1.0, cfg);
    CHECK(std::abs(r.value - 4.0 * std::numbers::pi / 3.0) <= 3 * r.error_estimate);
    // {rho < 1} on H^1 has volume pi^2 / 2 (integrate 2 sqrt(1 - |z|^4) over the unit disc).
    const auto h = ball_volume(builtin_group("h1"), 1.0, cfg);
    CHECK(std::abs(h.value - std::numbers::pi * std::numbers::pi / 2) <= 3 * h.error_estimate);
    cfg.target_rel_tol = 1e-6;
    CHECK_THROWS_AS(ball_volume(builtin_group("h1"), 1.0, cfg), ToleranceNotMet);
    CHECK_THROWS_AS(ball_volume(builtin_group("h1"), 0.0, QuadratureConfig{}), InvalidArgument);
  }

  TEST_CASE("volume of dilated boxes scales with lambda^Q") {
    const auto g = builtin_group("h2");
    Vector lo = test::uniform_point(5, 71, 0, -1.0, 0.0), hi = test::uniform_point(5, 72, 0, 0.1, 1.0);
    const double lambda = 1.6;
    const auto box = Domain::box(lo, hi);
    const auto big = Domain::box(dilate(g, lambda, lo), dilate(g, lambda, hi));
    CHECK(big.box_volume() == doctest::Approx(std::pow(lambda, 6) * box.box_volume()).epsilon(1e-13));
  }
}
