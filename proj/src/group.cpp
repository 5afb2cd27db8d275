#include "carnot/group.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <span>

namespace carnot {

namespace {

constexpr double kHTypeTolerance = 1e-12;

std::span<const double> as_span(const Point& x) { return {x.data(), static_cast<std::size_t>(x.size())}; }

/// Jet of |v|^4 + c |z|^2 where v is the first m coordinates.
template <int O>
Jet<O> quartic_gauge(const Point& x, int m, double c) {
  const Eigen::Index n = x.size();
  const auto v = x.head(m);
  const auto z = x.tail(n - m);
  const double v2 = v.squaredNorm();
  Jet<O> j;
  j.value = v2 * v2 + c * z.squaredNorm();
  j.gradient.resize(n);
  j.gradient.head(m) = 4.0 * v2 * v;
  j.gradient.tail(n - m) = 2.0 * c * z;
  if constexpr (O == 2) {
    j.hessian.setZero(n, n);
    j.hessian.topLeftCorner(m, m) = 8.0 * v * v.transpose();
    j.hessian.topLeftCorner(m, m).diagonal().array() += 4.0 * v2;
    j.hessian.bottomRightCorner(n - m, n - m).diagonal().setConstant(2.0 * c);
  }
  return j;
}

double gauge_weight(const GroupSpec& g) { return g.kind() == GroupKind::heisenberg ? 1.0 : 16.0; }

}  // namespace

DilationWeights DilationWeights::from_layers(const std::vector<int>& layer_dims) {
  DilationWeights w;
  for (std::size_t layer = 0; layer < layer_dims.size(); ++layer) {
    w.exponents.insert(w.exponents.end(), layer_dims[layer], static_cast<int>(layer) + 1);
  }
  return w;
}

int DilationWeights::homogeneous_dimension() const {
  int q = 0;
  for (int e : exponents) q += e;
  return q;
}

void DilationWeights::validate(int m) const {
  if (m < 1 || m > static_cast<int>(exponents.size())) throw InvalidArgument("horizontal dimension out of range");
  for (int i = 0; i < m; ++i) {
    if (exponents[i] != 1) throw InvalidArgument("first-layer dilation exponents must equal 1");
  }
  for (std::size_t i = 1; i < exponents.size(); ++i) {
    if (exponents[i] < exponents[i - 1]) throw InvalidArgument("dilation exponents must be nondecreasing");
  }
  if (static_cast<int>(exponents.size()) > m && exponents[m] <= 1) {
    throw InvalidArgument("exponents beyond the first layer must exceed 1");
  }
}

HTypeValidation validate_htype(const HTypeStructure& s, int m, int k) {
  if (s.k() != k) throw InvalidArgument("expected " + std::to_string(k) + " J matrices, got " + std::to_string(s.k()));
  for (const auto& J : s.J) {
    if (J.rows() != m || J.cols() != m) throw InvalidArgument("J matrix is not " + std::to_string(m) + "x" + std::to_string(m));
  }
  HTypeValidation report;
  const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(m, m);
  for (int i = 0; i < k; ++i) {
    const double skew = (s.J[i] + s.J[i].transpose()).cwiseAbs().maxCoeff();
    report.max_skew_residual = std::max(report.max_skew_residual, skew);
    if (skew > kHTypeTolerance) report.violations.push_back("J[" + std::to_string(i) + "] is not skew-symmetric");
    for (int j = i; j < k; ++j) {
      const Eigen::MatrixXd anti = s.J[i] * s.J[j] + s.J[j] * s.J[i] + (i == j ? 2.0 : 0.0) * id;
      const double r = anti.cwiseAbs().maxCoeff();
      report.max_anticommutator_residual = std::max(report.max_anticommutator_residual, r);
      if (r > kHTypeTolerance) {
        report.violations.push_back(i == j ? "J[" + std::to_string(i) + "]^2 != -Id"
                                           : "J[" + std::to_string(i) + "] and J[" + std::to_string(j) +
                                                 "] do not anticommute");
      }
    }
  }
  report.valid = report.violations.empty();
  return report;
}

HTypeStructure quaternionic_structure() {
  Eigen::MatrixXd li(4, 4), lj(4, 4), lk(4, 4);
  li << 0, -1, 0, 0,
        1, 0, 0, 0,
        0, 0, 0, -1,
        0, 0, 1, 0;
  lj << 0, 0, -1, 0,
        0, 0, 0, 1,
        1, 0, 0, 0,
        0, -1, 0, 0;
  lk << 0, 0, 0, -1,
        0, 0, -1, 0,
        0, 1, 0, 0,
        1, 0, 0, 0;
  return {{li, lj, lk}};
}

std::string_view to_string(GroupKind kind) {
  switch (kind) {
    case GroupKind::abelian: return "abelian";
    case GroupKind::heisenberg: return "heisenberg";
    case GroupKind::htype: return "htype";
    case GroupKind::custom: return "custom";
  }
  return "unknown";
}

std::string_view to_string(NormKind kind) {
  switch (kind) {
    case NormKind::euclidean: return "euclidean";
    case NormKind::heisenberg_rho: return "heisenberg_rho";
    case NormKind::htype_K: return "htype_K";
    case NormKind::user_supplied: return "user_supplied";
  }
  return "unknown";
}

GroupSpec GroupSpec::abelian(int n) {
  if (n < 1 || n > kMaxDim) throw InvalidArgument("abelian dimension must be in [1, " + std::to_string(kMaxDim) + "]");
  GroupSpec g;
  g.name_ = "abelian-" + std::to_string(n);
  g.n_ = g.m_ = n;
  g.layer_dims_ = {n};
  g.weights_ = DilationWeights::from_layers(g.layer_dims_);
  g.kind_ = GroupKind::abelian;
  g.norm_kind_ = NormKind::euclidean;
  g.finalize_frame(std::vector<HorizontalField>(n));
  return g;
}

GroupSpec GroupSpec::heisenberg(int n) {
  if (n < 1 || 2 * n + 1 > kMaxDim) throw InvalidArgument("Heisenberg order out of range");
  GroupSpec g;
  g.name_ = "h" + std::to_string(n);
  g.n_ = 2 * n + 1;
  g.m_ = 2 * n;
  g.layer_dims_ = {2 * n, 1};
  g.weights_ = DilationWeights::from_layers(g.layer_dims_);
  g.kind_ = GroupKind::heisenberg;
  g.norm_kind_ = NormKind::heisenberg_rho;
  g.heisenberg_order_ = n;
  const int nv = g.n_;
  const int t = 2 * n;
  std::vector<HorizontalField> frame(2 * n);
  for (int j = 0; j < n; ++j) {
    frame[j].coefficients.push_back({t, Polynomial::variable(nv, n + j, 2.0)});   // X_j = d_xj + 2 y_j d_t
    frame[n + j].coefficients.push_back({t, Polynomial::variable(nv, j, -2.0)});  // Y_j = d_yj - 2 x_j d_t
  }
  g.finalize_frame(std::move(frame));
  return g;
}

GroupSpec GroupSpec::htype(std::string name, HTypeStructure structure) {
  const int m = structure.m();
  const int k = structure.k();
  if (m < 1 || k < 1 || m + k > kMaxDim) throw InvalidArgument("H-type dimensions out of range");
  const auto check = validate_htype(structure, m, k);
  if (!check.valid) throw InvalidArgument("invalid H-type structure: " + check.violations.front());
  GroupSpec g;
  g.name_ = std::move(name);
  g.n_ = m + k;
  g.m_ = m;
  g.layer_dims_ = {m, k};
  g.weights_ = DilationWeights::from_layers(g.layer_dims_);
  g.kind_ = GroupKind::htype;
  g.norm_kind_ = NormKind::htype_K;
  // X_j = d_vj + (1/2) sum_i (J_i v)_j d_zi
  std::vector<HorizontalField> frame(m);
  for (int j = 0; j < m; ++j) {
    for (int i = 0; i < k; ++i) {
      Polynomial a(g.n_);
      for (int l = 0; l < m; ++l) {
        if (structure.J[i](j, l) != 0.0) a = a + Polynomial::variable(g.n_, l, 0.5 * structure.J[i](j, l));
      }
      if (!a.is_zero()) frame[j].coefficients.push_back({m + i, std::move(a)});
    }
  }
  g.htype_ = std::move(structure);
  g.finalize_frame(std::move(frame));
  return g;
}

GroupSpec GroupSpec::custom(std::string name, std::vector<int> layer_dims, std::vector<HorizontalField> frame,
                            std::vector<Polynomial> law, std::optional<DilationWeights> weights) {
  if (layer_dims.empty()) throw InvalidArgument("custom group needs at least one layer");
  int n = 0;
  for (int d : layer_dims) {
    if (d < 1) throw InvalidArgument("layer dimensions must be positive");
    n += d;
  }
  if (n > kMaxDim) throw InvalidArgument("custom group dimension exceeds " + std::to_string(kMaxDim));
  GroupSpec g;
  g.name_ = std::move(name);
  g.n_ = n;
  g.m_ = layer_dims.front();
  g.layer_dims_ = std::move(layer_dims);
  g.weights_ = weights ? *weights : DilationWeights::from_layers(g.layer_dims_);
  if (static_cast<int>(g.weights_.exponents.size()) != n) throw InvalidArgument("weights length differs from dimension");
  g.weights_.validate(g.m_);
  g.kind_ = GroupKind::custom;
  g.norm_kind_ = NormKind::user_supplied;
  if (!law.empty()) {
    if (static_cast<int>(law.size()) != n) throw InvalidArgument("group law needs one polynomial per coordinate");
    for (int i = 0; i < n; ++i) {
      if (law[i].num_vars() != 2 * n) throw InvalidArgument("group law polynomials take 2n variables");
      if (i < g.m_ && !law[i].is_zero()) throw InvalidArgument("group law must be additive on the first layer");
    }
  }
  g.law_ = std::move(law);
  g.finalize_frame(std::move(frame));
  return g;
}

void GroupSpec::finalize_frame(std::vector<HorizontalField> frame) {
  if (static_cast<int>(frame.size()) != m_) throw InvalidArgument("frame must have one field per first-layer coordinate");
  const auto& w = weights_.exponents;
  const std::vector<double> origin(n_, 0.0);
  coefficients_.assign(m_, {});
  for (int j = 0; j < m_; ++j) {
    for (const auto& c : frame[j].coefficients) {
      if (c.row <= j || c.row >= n_) throw InvalidArgument("frame coefficient row out of range");
      if (c.poly.num_vars() != n_) throw InvalidArgument("frame polynomial has wrong number of variables");
      if (c.poly.is_zero()) continue;
      const auto degree = c.poly.weighted_degree(w);
      if (!degree || *degree != w[c.row] - w[j]) {
        throw InvalidArgument("frame coefficient a_" + std::to_string(c.row) + "," + std::to_string(j) +
                              " is not homogeneous of degree w_i - w_j");
      }
      if (c.poly(origin) != 0.0) throw InvalidArgument("frame does not reduce to coordinate derivatives at the origin");
      Coefficient coeff{c.row, c.poly, {}};
      for (int l = 0; l < n_; ++l) {
        auto d = c.poly.derivative(l);
        if (!d.is_zero()) coeff.partials.emplace_back(l, std::move(d));
      }
      coefficients_[j].push_back(std::move(coeff));
    }
  }
  frame_ = std::move(frame);
}

GroupSpec GroupSpec::with_norm(ScalarField norm) const {
  if (!norm) throw InvalidArgument("user-supplied norm has no evaluator");
  GroupSpec g = *this;
  g.user_norm_ = std::move(norm);
  g.norm_kind_ = NormKind::user_supplied;
  return g;
}

GroupSpec GroupSpec::renamed(std::string name) const {
  GroupSpec g = *this;
  g.name_ = std::move(name);
  return g;
}

void GroupSpec::check_point(const Point& x) const {
  if (x.size() != n_) {
    throw InvalidArgument("point has dimension " + std::to_string(x.size()) + ", group " + name_ + " has " +
                          std::to_string(n_));
  }
}

Matrix GroupSpec::frame_matrix(const Point& x) const {
  Matrix c = Matrix::Zero(m_, n_);
  const auto xs = as_span(x);
  for (int j = 0; j < m_; ++j) {
    c(j, j) = 1.0;
    for (const auto& a : coefficients_[j]) c(j, a.row) = a.poly(xs);
  }
  return c;
}

Matrix GroupSpec::frame_jacobian(int j, const Point& x) const {
  Matrix d = Matrix::Zero(n_, n_);
  const auto xs = as_span(x);
  for (const auto& a : coefficients_[j]) {
    for (const auto& [l, p] : a.partials) d(a.row, l) = p(xs);
  }
  return d;
}

Point multiply(const GroupSpec& g, const Point& x, const Point& y) {
  g.check_point(x);
  g.check_point(y);
  Point r = x + y;
  switch (g.kind()) {
    case GroupKind::abelian:
      break;
    case GroupKind::heisenberg: {
      const int n = g.heisenberg_order();
      double im = 0.0;
      for (int j = 0; j < n; ++j) im += x[n + j] * y[j] - x[j] * y[n + j];  // Im(z_j conj(z'_j))
      r[2 * n] += 2.0 * im;
      break;
    }
    case GroupKind::htype: {
      const auto& s = *g.htype_structure();
      const int m = g.horizontal_dim();
      for (int i = 0; i < s.k(); ++i) {
        r[m + i] += 0.5 * x.head(m).dot(s.J[i].transpose() * y.head(m));  // <J_i v, v'>
      }
      break;
    }
    case GroupKind::custom: {
      if (g.law().empty()) throw InvalidArgument("group " + g.name() + " has no product polynomials");
      std::vector<double> xy(2 * g.dim());
      for (int i = 0; i < g.dim(); ++i) {
        xy[i] = x[i];
        xy[g.dim() + i] = y[i];
      }
      for (int i = 0; i < g.dim(); ++i) r[i] += g.law()[i](xy);
      break;
    }
  }
  return r;
}

Point inverse(const GroupSpec& g, const Point& x) {
  g.check_point(x);
  return -x;
}

Point dilate(const GroupSpec& g, double lambda, const Point& x) {
  g.check_point(x);
  if (!(lambda > 0.0)) throw InvalidArgument("dilation factor must be positive");
  Point r = x;
  const auto& w = g.weights().exponents;
  for (int i = 0; i < g.dim(); ++i) r[i] *= std::pow(lambda, w[i]);
  return r;
}

double homogeneous_norm(const GroupSpec& g, const Point& x) {
  g.check_point(x);
  switch (g.norm_kind()) {
    case NormKind::euclidean:
      return x.norm();
    case NormKind::heisenberg_rho:
    case NormKind::htype_K: {
      const int m = g.horizontal_dim();
      const double v2 = x.head(m).squaredNorm();
      return std::pow(v2 * v2 + gauge_weight(g) * x.tail(g.dim() - m).squaredNorm(), 0.25);
    }
    case NormKind::user_supplied:
      if (!g.user_norm()) throw InvalidArgument("group " + g.name() + " has no homogeneous norm attached");
      if (x.isZero(0.0)) return 0.0;
      return g.user_norm().value(x);
  }
  return 0.0;
}

template <int O>
Jet<O> norm_jet(const GroupSpec& g, const Point& x) {
  g.check_point(x);
  if (x.isZero(0.0)) throw DomainError("homogeneous norm is not differentiable at the origin");
  switch (g.norm_kind()) {
    case NormKind::euclidean: {
      const double r = x.norm();
      Jet<O> j;
      j.value = r;
      j.gradient = x / r;
      if constexpr (O == 2) {
        j.hessian = -(x * x.transpose()) / (r * r * r);
        j.hessian.diagonal().array() += 1.0 / r;
      }
      return j;
    }
    case NormKind::heisenberg_rho:
    case NormKind::htype_K: {
      const auto p = quartic_gauge<O>(x, g.horizontal_dim(), gauge_weight(g));
      const double q = std::pow(p.value, -0.75);
      return compose(p, p.value * q, 0.25 * q, -0.1875 * q / p.value);
    }
    case NormKind::user_supplied:
      if (!g.user_norm()) throw InvalidArgument("group " + g.name() + " has no homogeneous norm attached");
      return g.user_norm().jet<O>(x);
  }
  throw InvalidArgument("unknown norm kind");
}

template <int O>
Jet<O> gauge_jet(const GroupSpec& g, const Point& x) {
  g.check_point(x);
  switch (g.norm_kind()) {
    case NormKind::euclidean:
      return quartic_gauge<O>(x, g.dim(), 0.0);
    case NormKind::heisenberg_rho:
    case NormKind::htype_K:
      return quartic_gauge<O>(x, g.horizontal_dim(), gauge_weight(g));
    case NormKind::user_supplied: {
      const auto n = norm_jet<O>(g, x);
      return square(square(n));
    }
  }
  throw InvalidArgument("unknown norm kind");
}

template Jet1 norm_jet<1>(const GroupSpec&, const Point&);
template Jet2 norm_jet<2>(const GroupSpec&, const Point&);
template Jet1 gauge_jet<1>(const GroupSpec&, const Point&);
template Jet2 gauge_jet<2>(const GroupSpec&, const Point&);

ScalarField norm_field(const GroupSpec& g) {
  return ScalarField([g](const Point& x) { return norm_jet<2>(g, x); }, Smoothness::away_from_origin,
                     [g](const Point& x) { return norm_jet<1>(g, x); });
}

double folland_constant(double Q) {
  if (!(Q > 2.0)) throw InvalidArgument("Folland constant needs Q > 2");
  const double gm = std::tgamma((Q - 2.0) / 4.0);
  return std::pow(2.0, (Q - 2.0) / 2.0) * gm * gm / std::pow(std::numbers::pi, Q / 2.0);
}

double fundamental_solution_constant(const GroupSpec& g) {
  return g.kind() == GroupKind::heisenberg ? folland_constant(g.homogeneous_dimension()) : 1.0;
}

double fundamental_solution(const GroupSpec& g, const Point& x) {
  const int q = g.homogeneous_dimension();
  if (q < 3) throw InvalidArgument("fundamental solution N^{2-Q} needs Q >= 3");
  const double n = homogeneous_norm(g, x);
  if (n == 0.0) throw DomainError("fundamental solution evaluated at its pole");
  return fundamental_solution_constant(g) * std::pow(n, 2.0 - q);
}

GroupSpec builtin_group(std::string_view name) {
  if (name == "h1") return GroupSpec::heisenberg(1);
  if (name == "h2") return GroupSpec::heisenberg(2);
  if (name == "h3") return GroupSpec::heisenberg(3);
  if (name == "quaternionic-h1") return GroupSpec::htype("quaternionic-h1", quaternionic_structure());
  constexpr std::string_view prefix = "abelian-";
  if (name.starts_with(prefix)) {
    int n = 0;
    const auto digits = name.substr(prefix.size());
    const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), n);
    if (ec == std::errc() && ptr == digits.data() + digits.size()) return GroupSpec::abelian(n);
  }
  throw InvalidArgument("unknown group '" + std::string(name) + "'");
}

std::vector<std::string> builtin_group_names() { return {"h1", "h2", "h3", "quaternionic-h1", "abelian-N"}; }

}  // namespace carnot
