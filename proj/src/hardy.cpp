#include "carnot/hardy.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "carnot/diffops.hpp"
#include "carnot/random.hpp"

namespace carnot {

namespace {

constexpr double kPi = std::numbers::pi;

/// exp(1 - 1 / (1 - u)) and its first two derivatives, u < 1.
struct PlateauValues {
  double e, d1, d2;
};

PlateauValues plateau(double u) {
  const double w = 1.0 / (1.0 - u);
  const double e = std::exp(1.0 - w);
  return {e, -e * w * w, e * (w * w * w * w - 2.0 * w * w * w)};
}

template <int O>
Jet<O> zero_jet(Eigen::Index n) {
  return Jet<O>::constant(0.0, n);
}

Vector dilation_scale(const GroupSpec& g, double lambda) {
  Vector s(g.dim());
  for (int i = 0; i < g.dim(); ++i) s[i] = std::pow(lambda, g.weights().exponents[i]);
  return s;
}

double combined_relative(const IntegrationResult& a, const IntegrationResult& b) {
  const double ra = a.value != 0.0 ? a.error_estimate / std::abs(a.value) : 0.0;
  const double rb = b.value != 0.0 ? b.error_estimate / std::abs(b.value) : 0.0;
  return std::hypot(ra, rb);
}

std::string describe(const Vector& v) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (Eigen::Index i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ']';
  return os.str();
}

}  // namespace

double sharp_constant(double Q, double alpha) {
  const double h = Q + alpha - 2.0;
  if (!(h > 0.0)) throw InvalidArgument("sharp constant needs Q + alpha - 2 > 0");
  return 0.25 * h * h;
}

double optimal_beta(double Q, double alpha) { return 0.5 * (2.0 - Q - alpha); }

HardyProblem::HardyProblem(GroupSpec group, double alpha) : group_(std::move(group)), alpha_(alpha) {
  if (!(group_.homogeneous_dimension() + alpha_ - 2.0 > 0.0)) {
    throw InvalidArgument("Hardy problem needs Q + alpha - 2 > 0 (Q = " +
                          std::to_string(group_.homogeneous_dimension()) + ", alpha = " + std::to_string(alpha_) + ")");
  }
}

double HardyProblem::sharp_constant() const { return carnot::sharp_constant(homogeneous_dimension(), alpha_); }

double HardyProblem::weight(const Point& x) const { return std::pow(homogeneous_norm(group_, x), alpha_); }

double HardyProblem::potential(const Point& x) const {
  const Jet1 n = norm_jet<1>(group_, x);
  const double g2 = (group_.frame_matrix(x) * n.gradient).squaredNorm();
  return std::pow(n.value, alpha_) * g2 / (n.value * n.value);
}

Bump random_bump(const GroupSpec& g, std::uint64_t seed, std::uint64_t index) {
  const CounterRng rng(seed ^ 0x243f6a8885a308d3ULL);
  const int n = g.dim();
  Point u(n);
  for (std::uint64_t attempt = 0;; ++attempt) {
    for (int i = 0; i < n; ++i) u[i] = rng.uniform(index, attempt * kMaxDim + i, -1.0, 1.0);
    if (u.norm() > 1e-2) break;
  }
  const double target = std::exp(rng.uniform(index, 1000, std::log(0.2), std::log(5.0)));
  Bump b;
  b.center = dilate(g, target / homogeneous_norm(g, u), u);
  b.radii.resize(n);
  b.tilt.resize(n);
  for (int i = 0; i < n; ++i) b.tilt[i] = rng.uniform(index, 2000 + i, -0.4, 0.4) / std::sqrt(n);
  b.plateau = rng.uniform(index, 3000) < 0.5 ? 1 : 2;
  double eps = rng.uniform(index, 3001, 0.15, 0.5);
  for (;; eps *= 0.7) {
    for (int i = 0; i < n; ++i) {
      b.radii[i] = std::pow(eps * target, g.weights().exponents[i]) * rng.uniform(index, 4000 + i, 0.7, 1.3);
    }
    if (b.center.cwiseQuotient(b.radii).squaredNorm() > 1.5) break;
  }
  return b;
}

TestFunction TestFunction::radial(double beta, RadialProfile cutoff) {
  if (!std::isfinite(cutoff.lo) || !std::isfinite(cutoff.hi) || !(cutoff.hi > cutoff.lo)) {
    throw InvalidArgument("radial cutoff needs a bounded support in log-radius");
  }
  TestFunction t;
  t.kind_ = Kind::radial;
  t.beta_ = beta;
  t.cutoff_ = std::move(cutoff);
  return t;
}

TestFunction TestFunction::log_sine(double beta, double r_in, double L) {
  if (!(r_in > 0.0) || !(L > 0.0)) throw InvalidArgument("log-sine profile needs r_in > 0 and L > 0");
  const double s0 = std::log(r_in);
  const double k = kPi / L;
  RadialProfile g{[s0, k](double s) { return std::sin(k * (s - s0)); },
                  [s0, k](double s) { return k * std::cos(k * (s - s0)); },
                  [s0, k](double s) { return -k * k * std::sin(k * (s - s0)); }, s0, s0 + L};
  return radial(beta, std::move(g));
}

TestFunction TestFunction::bump(Bump b) {
  const auto n = b.center.size();
  if (n == 0 || b.radii.size() != n || b.tilt.size() != n) throw InvalidArgument("bump parameters have mismatched sizes");
  if (!(b.radii.array() > 0.0).all()) throw InvalidArgument("bump radii must be positive");
  if (b.plateau != 1 && b.plateau != 2) throw InvalidArgument("bump plateau exponent must be 1 or 2");
  TestFunction t;
  t.kind_ = Kind::bump;
  t.bump_ = std::move(b);
  return t;
}

TestFunction TestFunction::gauge_bump(double radius) {
  if (!(radius > 0.0)) throw InvalidArgument("gauge bump radius must be positive");
  TestFunction t;
  t.kind_ = Kind::gauge_bump;
  t.radius_ = radius;
  return t;
}

TestFunction TestFunction::general(ScalarField f, Vector lo, Vector hi) {
  if (!f) throw InvalidArgument("test function field has no evaluator");
  Domain::box(lo, hi);  // validates
  TestFunction t;
  t.kind_ = Kind::general;
  t.field_ = std::move(f);
  t.lo_ = std::move(lo);
  t.hi_ = std::move(hi);
  return t;
}

TestFunction TestFunction::dilated(double lambda) const {
  if (!(lambda > 0.0)) throw InvalidArgument("dilation factor must be positive");
  TestFunction t = *this;
  t.dilation_ *= lambda;
  return t;
}

template <int O>
Jet<O> TestFunction::undilated_jet(const GroupSpec& g, const Point& x) const {
  const auto n = x.size();
  switch (kind_) {
    case Kind::radial: {
      if (x.isZero(0.0)) return zero_jet<O>(n);
      const Jet<O> nj = norm_jet<O>(g, x);
      const double r = nj.value;
      const double s = std::log(r);
      if (s <= cutoff_.lo || s >= cutoff_.hi) return zero_jet<O>(n);
      const double g0 = cutoff_.f(s);
      const double g1 = cutoff_.df(s);
      const double g2 = cutoff_.d2f(s);
      const double rb = std::pow(r, beta_);
      const double f0 = rb * g0;
      const double f1 = rb / r * (beta_ * g0 + g1);
      const double f2 = rb / (r * r) * (beta_ * (beta_ - 1.0) * g0 + (2.0 * beta_ - 1.0) * g1 + g2);
      return compose(nj, f0, f1, f2);
    }
    case Kind::bump: {
      if (n != bump_.center.size()) throw InvalidArgument("bump dimension differs from point dimension");
      const Vector y = (x - bump_.center).cwiseQuotient(bump_.radii);
      const double s = y.squaredNorm();
      if (s >= 1.0) return zero_jet<O>(n);
      Jet<O> sj;
      sj.value = s;
      sj.gradient = 2.0 * y.cwiseQuotient(bump_.radii);
      if constexpr (O == 2) {
        sj.hessian.setZero(n, n);
        sj.hessian.diagonal() = 2.0 * bump_.radii.cwiseProduct(bump_.radii).cwiseInverse();
      }
      const Jet<O> u = bump_.plateau == 2 ? square(sj) : sj;
      const auto pv = plateau(u.value);
      Jet<O> tilt = Jet<O>::constant(1.0 + bump_.tilt.dot(y), n);
      tilt.gradient = bump_.tilt.cwiseQuotient(bump_.radii);
      return tilt * compose(u, pv.e, pv.d1, pv.d2);
    }
    case Kind::gauge_bump: {
      const double r4 = std::pow(radius_, 4);
      const Jet<O> p = gauge_jet<O>(g, x) / r4;
      if (p.value >= 1.0) return zero_jet<O>(n);
      const auto pv = plateau(p.value);
      return compose(p, pv.e, pv.d1, pv.d2);
    }
    case Kind::general:
      if (!field_.in_domain(x)) return zero_jet<O>(n);
      return field_.jet<O>(x);
  }
  throw InvalidArgument("unknown test function kind");
}

template <int O>
Jet<O> TestFunction::jet(const GroupSpec& g, const Point& x) const {
  g.check_point(x);
  if (dilation_ == 1.0) return undilated_jet<O>(g, x);
  const Vector scale = dilation_scale(g, dilation_);
  Jet<O> j = undilated_jet<O>(g, x.cwiseProduct(scale));
  j.gradient = j.gradient.cwiseProduct(scale);
  if constexpr (O == 2) j.hessian = scale.asDiagonal() * j.hessian * scale.asDiagonal();
  return j;
}

template Jet1 TestFunction::jet<1>(const GroupSpec&, const Point&) const;
template Jet2 TestFunction::jet<2>(const GroupSpec&, const Point&) const;

Domain TestFunction::support(const GroupSpec& g) const {
  if (kind_ == Kind::radial) {
    return Domain::norm_annulus(g, std::exp(cutoff_.lo) / dilation_, std::exp(cutoff_.hi) / dilation_);
  }
  Vector lo, hi;
  switch (kind_) {
    case Kind::bump:
      if (bump_.center.size() != g.dim()) throw InvalidArgument("bump dimension differs from group dimension");
      lo = bump_.center - bump_.radii;
      hi = bump_.center + bump_.radii;
      break;
    case Kind::gauge_bump:
      hi = dilation_scale(g, radius_);
      lo = -hi;
      break;
    default:
      lo = lo_;
      hi = hi_;
      break;
  }
  const Vector inv = dilation_scale(g, 1.0 / dilation_);
  return Domain::box(lo.cwiseProduct(inv), hi.cwiseProduct(inv));
}

RadialProfile TestFunction::radial_profile() const {
  if (kind_ != Kind::radial) throw InvalidArgument("radial profile requested for a non-radial test function");
  const double beta = beta_;
  const double lam = dilation_;
  const auto g = cutoff_;
  RadialProfile f;
  f.f = [=](double r) {
    const double t = lam * r;
    return std::pow(t, beta) * g.f(std::log(t));
  };
  f.df = [=](double r) {
    const double t = lam * r;
    const double s = std::log(t);
    return lam * std::pow(t, beta - 1.0) * (beta * g.f(s) + g.df(s));
  };
  f.d2f = [=](double r) {
    const double t = lam * r;
    const double s = std::log(t);
    return lam * lam * std::pow(t, beta - 2.0) *
           (beta * (beta - 1.0) * g.f(s) + (2.0 * beta - 1.0) * g.df(s) + g.d2f(s));
  };
  f.lo = std::exp(g.lo) / lam;
  f.hi = std::exp(g.hi) / lam;
  return f;
}

std::string_view to_string(QuotientMethod method) {
  return method == QuotientMethod::full_dim ? "full_dim" : "radial_1d";
}

QuotientMethod parse_quotient_method(std::string_view name) {
  if (name == "full_dim" || name == "full") return QuotientMethod::full_dim;
  if (name == "radial_1d" || name == "radial") return QuotientMethod::radial_1d;
  throw InvalidArgument("unknown quotient method '" + std::string(name) + "'");
}

bool HardyReport::satisfies_bound(double sigmas) const { return relative_gap >= -sigmas * relative_gap_error; }

HardyReport rayleigh_quotient(const HardyProblem& p, const TestFunction& phi, const QuadratureConfig& cfg,
                              QuotientMethod method) {
  const GroupSpec& g = p.group();
  HardyReport report;
  report.group = g.name();
  report.alpha = p.alpha();
  report.method = method;
  report.config = cfg;
  report.sharp_constant = p.sharp_constant();

  if (method == QuotientMethod::radial_1d) {
    if (phi.kind() != TestFunction::Kind::radial) throw InvalidArgument("radial_1d needs a radial test function");
    const auto r = radial_reduce(p.homogeneous_dimension(), p.alpha(), phi.radial_profile());
    report.numerator = r.numerator;
    report.denominator = r.denominator;
  } else {
    const double alpha = p.alpha();
    const auto integrand = [&](const Point& x, std::span<double> out) {
      const Jet1 pj = phi.jet<1>(g, x);
      if (pj.value == 0.0 && pj.gradient.isZero(0.0)) {
        out[0] = out[1] = 0.0;
        return;
      }
      const Matrix c = g.frame_matrix(x);
      const Jet1 nj = norm_jet<1>(g, x);
      const double w = std::pow(nj.value, alpha);
      out[0] = w * (c * pj.gradient).squaredNorm();
      out[1] = w * (c * nj.gradient).squaredNorm() / (nj.value * nj.value) * pj.value * pj.value;
    };
    const auto r = integrate(2, integrand, phi.support(g), cfg);
    report.numerator = r[0];
    report.denominator = r[1];
  }

  const auto& den = report.denominator;
  if (!(den.value > 0.0) || den.value <= 3.0 * den.error_estimate) {
    throw DegenerateTestFunction("denominator " + std::to_string(den.value) + " +/- " +
                                 std::to_string(den.error_estimate) + " is indistinguishable from zero");
  }
  report.quotient = report.numerator.value / den.value;
  report.quotient_error = std::abs(report.quotient) * combined_relative(report.numerator, den);
  report.relative_gap = report.quotient / report.sharp_constant - 1.0;
  report.relative_gap_error = report.quotient_error / report.sharp_constant;
  report.tolerance_met = report.numerator.tolerance_met && den.tolerance_met;
  return report;
}

std::vector<double> decade_grid(int decades) {
  if (decades < 1) throw InvalidArgument("decade grid needs at least one decade");
  std::vector<double> grid;
  for (int k = 1; k <= decades; ++k) grid.push_back(k * std::log(10.0));
  return grid;
}

SweepResult sharpness_sweep(const HardyProblem& p, const std::vector<double>& L_grid, double r_in) {
  if (L_grid.empty()) throw InvalidArgument("sweep grid is empty");
  for (std::size_t i = 0; i < L_grid.size(); ++i) {
    if (!(L_grid[i] > 0.0)) throw InvalidArgument("sweep widths must be positive");
    if (i > 0 && !(L_grid[i] > L_grid[i - 1])) throw InvalidArgument("sweep grid must be increasing");
  }
  const double q = p.homogeneous_dimension();
  const double beta = optimal_beta(q, p.alpha());
  SweepResult out;
  out.group = p.group().name();
  out.alpha = p.alpha();
  out.sharp_constant = p.sharp_constant();
  out.r_in = r_in;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int fit = 0;
  for (double L : L_grid) {
    const auto phi = TestFunction::log_sine(beta, r_in, L);
    const auto r = radial_reduce(q, p.alpha(), phi.radial_profile());
    SweepRow row;
    row.L = L;
    row.quotient = r.quotient();
    row.predicted = out.sharp_constant + kPi * kPi / (L * L);
    row.deviation = std::abs(row.quotient - row.predicted);
    out.rows.push_back(row);
    const double gap = row.quotient - out.sharp_constant;
    if (gap > 0.0) {
      const double lx = std::log(L), ly = std::log(gap);
      sx += lx;
      sy += ly;
      sxx += lx * lx;
      sxy += lx * ly;
      ++fit;
    }
  }
  out.gap_slope = fit >= 2 ? (fit * sxy - sx * sy) / (fit * sxx - sx * sx) : std::nan("");
  return out;
}

UncertaintyReport uncertainty_check(const GroupSpec& g, const TestFunction& phi, const QuadratureConfig& cfg) {
  const double q = g.homogeneous_dimension();
  if (q < 3) throw InvalidArgument("uncertainty principle needs Q >= 3");
  const auto integrand = [&](const Point& x, std::span<double> out) {
    const Jet1 pj = phi.jet<1>(g, x);
    if ((pj.value == 0.0 && pj.gradient.isZero(0.0)) || x.isZero(0.0)) {
      out[0] = out[1] = out[2] = 0.0;
      return;
    }
    const Matrix c = g.frame_matrix(x);
    const Jet1 nj = norm_jet<1>(g, x);
    const double gn2 = (c * nj.gradient).squaredNorm();
    const double p2 = pj.value * pj.value;
    out[0] = nj.value * nj.value * gn2 * p2;
    out[1] = (c * pj.gradient).squaredNorm();
    out[2] = gn2 * p2;
  };
  const auto r = integrate(3, integrand, phi.support(g), cfg);
  UncertaintyReport u;
  u.position = r[0];
  u.kinetic = r[1];
  u.mass = r[2];
  const double k = 0.25 * (q - 2.0) * (q - 2.0);
  u.lhs = u.position.value * u.kinetic.value;
  u.lhs_error = std::hypot(u.position.error_estimate * u.kinetic.value, u.position.value * u.kinetic.error_estimate);
  u.rhs = k * u.mass.value * u.mass.value;
  u.rhs_error = 2.0 * k * std::abs(u.mass.value) * u.mass.error_estimate;
  u.ok = u.lhs >= u.rhs - 3.0 * std::hypot(u.lhs_error, u.rhs_error);
  return u;
}

NormCertification certify_norm(const GroupSpec& g, const ScalarField& candidate, const CertifyOptions& options) {
  const double q = g.homogeneous_dimension();
  if (q < 3) throw InvalidArgument("norm certification needs Q >= 3");
  if (!candidate) throw InvalidArgument("candidate norm has no evaluator");
  if (options.samples < 1) throw InvalidArgument("certification needs at least one sample");
  const CounterRng rng(options.seed ^ 0x13198a2e03707344ULL);
  const int n = g.dim();
  const auto finite = [](double v, const char* what) {
    if (!std::isfinite(v)) throw NonFiniteSample(std::string("candidate norm is not finite (") + what + ")");
    return v;
  };

  NormCertification c;
  c.samples = options.samples;
  if (candidate.smoothness() == Smoothness::everywhere) {
    c.positivity = std::abs(finite(candidate.value(Point::Zero(n)), "origin"));
  }
  for (int k = 0; k < options.samples; ++k) {
    const auto idx = static_cast<std::uint64_t>(k);
    Point u(n);
    for (std::uint64_t attempt = 0;; ++attempt) {
      for (int i = 0; i < n; ++i) u[i] = rng.uniform(idx, attempt * kMaxDim + i, -1.0, 1.0);
      if (u.norm() > 1e-3) break;
    }
    const Point x = dilate(g, std::pow(10.0, rng.uniform(idx, 500, -1.0, 1.0)), u);
    const double lambda = rng.uniform(idx, 501, 0.5, 2.0);

    const Jet2 nj = candidate.jet2(x);
    const double nx = finite(nj.value, "sample");
    if (nx <= 0.0) {
      c.positivity = std::max(c.positivity, nx == 0.0 ? 1.0 : -nx);
      continue;
    }
    const double scaled = finite(candidate.value(dilate(g, lambda, x)), "dilated sample");
    const double mirrored = finite(candidate.value(-x), "reflected sample");
    c.homogeneity = std::max(c.homogeneity, std::abs(scaled - lambda * nx) / (lambda * nx));
    c.symmetry = std::max(c.symmetry, std::abs(mirrored - nx) / nx);
    const double lap = finite(sub_laplacian(g, pow(nj, 2.0 - q), x), "sub-Laplacian");
    c.harmonicity = std::max(c.harmonicity, std::abs(lap) * std::pow(nx, q));
  }
  c.homogeneity_ok = c.homogeneity <= options.algebraic_threshold;
  c.symmetry_ok = c.symmetry <= options.algebraic_threshold;
  c.positivity_ok = c.positivity <= options.algebraic_threshold;
  c.harmonicity_ok = c.harmonicity <= options.harmonic_threshold;
  return c;
}

IntegrationResult dirac_normalization(const GroupSpec& g, const TestFunction& phi, const QuadratureConfig& cfg,
                                      std::optional<double> constant) {
  const double q = g.homogeneous_dimension();
  if (q < 3) throw InvalidArgument("fundamental solution needs Q >= 3");
  const double c = constant.value_or(fundamental_solution_constant(g));
  const auto integrand = [&](const Point& x) {
    if (x.isZero(0.0)) return 0.0;
    const Jet1 pj = phi.jet<1>(g, x);
    if (pj.gradient.isZero(0.0)) return 0.0;
    const Matrix fm = g.frame_matrix(x);
    const Jet1 nj = norm_jet<1>(g, x);
    const double dpsi = c * (2.0 - q) * std::pow(nj.value, 1.0 - q);
    return dpsi * (fm * nj.gradient).dot(fm * pj.gradient);
  };
  return integrate(integrand, phi.support(g), cfg);
}

IntegrationResult flux_normalization(const GroupSpec& g, const QuadratureConfig& cfg) {
  const double q = g.homogeneous_dimension();
  if (q < 3) throw InvalidArgument("fundamental solution needs Q >= 3");
  const auto integrand = [&](const Point& x) {
    if (x.isZero(0.0)) return 0.0;
    const Jet1 nj = norm_jet<1>(g, x);
    return (g.frame_matrix(x) * nj.gradient).squaredNorm();
  };
  const auto v = integrate(integrand, Domain::norm_annulus(g, 0.0, 1.0), cfg);
  IntegrationResult r = v;
  r.value = 1.0 / ((q - 2.0) * q * v.value);
  r.error_estimate = r.value * v.error_estimate / v.value;
  return r;
}

std::vector<BatteryRow> inequality_battery(const HardyProblem& p, int count, std::uint64_t seed,
                                           const QuadratureConfig& cfg) {
  if (count < 0) throw InvalidArgument("battery size must be nonnegative");
  std::vector<BatteryRow> rows;
  rows.reserve(count);
  for (int i = 0; i < count; ++i) {
    BatteryRow row;
    row.index = static_cast<std::uint64_t>(i);
    row.bump = random_bump(p.group(), seed, row.index);
    QuadratureConfig local = cfg;
    local.seed = splitmix64(cfg.seed + row.index);
    row.report = rayleigh_quotient(p, TestFunction::bump(row.bump), local, QuotientMethod::full_dim);
    if (!row.report.satisfies_bound(3.0)) {
      std::ostringstream os;
      os.precision(17);
      const auto& r = row.report;
      os << "Hardy inequality violated beyond 3 sigma on " << r.group << " (alpha = " << r.alpha << ")\n"
         << "  battery seed " << seed << ", bump index " << i << ", quadrature seed " << local.seed << ", budget "
         << local.budget << ", method " << to_string(local.method) << "\n"
         << "  center " << describe(row.bump.center) << "\n  radii " << describe(row.bump.radii) << "\n  tilt "
         << describe(row.bump.tilt) << ", plateau " << row.bump.plateau << "\n"
         << "  numerator " << r.numerator.value << " +/- " << r.numerator.error_estimate << "\n"
         << "  denominator " << r.denominator.value << " +/- " << r.denominator.error_estimate << "\n"
         << "  quotient " << r.quotient << " +/- " << r.quotient_error << " vs sharp constant " << r.sharp_constant;
      throw InequalityViolation(os.str(), r);
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace carnot
