#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "carnot/field.hpp"
#include "carnot/polynomial.hpp"
#include "carnot/types.hpp"

namespace carnot {

/// Exponents of the anisotropic dilation delta_lambda(x)_i = lambda^{w_i} x_i.
struct DilationWeights {
  std::vector<int> exponents;

  static DilationWeights from_layers(const std::vector<int>& layer_dims);

  int homogeneous_dimension() const;

  /// Throws unless the first `m` exponents are 1 and the sequence is nondecreasing.
  void validate(int m) const;
};

/// Bracket data of an H-type group: z -> J_z = sum_i z_i J[i], each J[i] an m x m matrix.
struct HTypeStructure {
  std::vector<Eigen::MatrixXd> J;

  int m() const { return J.empty() ? 0 : static_cast<int>(J.front().rows()); }
  int k() const { return static_cast<int>(J.size()); }
};

struct HTypeValidation {
  bool valid = true;
  double max_skew_residual = 0.0;
  double max_anticommutator_residual = 0.0;
  std::vector<std::string> violations;
};

/// Checks skew-symmetry and J_i J_j + J_j J_i = -2 delta_ij Id with tolerance 1e-12.
/// Throws InvalidArgument when the matrices are not `k` matrices of size m x m.
HTypeValidation validate_htype(const HTypeStructure& s, int m, int k);

/// Left multiplication by i, j, k on the quaternions (basis 1, i, j, k).
HTypeStructure quaternionic_structure();

/// One coefficient a_ij of a horizontal field X_j = d_j + sum_i a_ij d_i.
struct FrameCoefficient {
  int row = 0;
  Polynomial poly;
};

struct HorizontalField {
  std::vector<FrameCoefficient> coefficients;
};

enum class GroupKind { abelian, heisenberg, htype, custom };
enum class NormKind { euclidean, heisenberg_rho, htype_K, user_supplied };

std::string_view to_string(GroupKind kind);
std::string_view to_string(NormKind kind);

/// Immutable description of a Carnot group in exponential coordinates.
///
/// Each spec carries exactly one coordinate convention: Heisenberg groups use
/// the law t + t' + 2 Im(z . conj(z')) with frame X_j = d_xj + 2 y_j d_t,
/// Y_j = d_yj - 2 x_j d_t; H-type groups use the step-two BCH law
/// (v + v', z + z' + [v, v'] / 2) with [u, w]_i = <J_i u, w>.
class GroupSpec {
 public:
  static GroupSpec abelian(int n);
  static GroupSpec heisenberg(int n);
  static GroupSpec htype(std::string name, HTypeStructure structure);

  /// Group given by an explicit frame. `law` holds the n polynomials P_i(x, y)
  /// in 2n variables of x.y = x + y + P(x, y); it may be empty, in which case
  /// the product is unavailable.
  static GroupSpec custom(std::string name, std::vector<int> layer_dims, std::vector<HorizontalField> frame,
                          std::vector<Polynomial> law = {}, std::optional<DilationWeights> weights = std::nullopt);

  /// Copy of this group whose homogeneous norm is `norm` (kind user_supplied).
  GroupSpec with_norm(ScalarField norm) const;
  GroupSpec renamed(std::string name) const;

  const std::string& name() const { return name_; }
  int dim() const { return n_; }
  int horizontal_dim() const { return m_; }
  int step() const { return static_cast<int>(layer_dims_.size()); }
  const std::vector<int>& layer_dims() const { return layer_dims_; }
  const DilationWeights& weights() const { return weights_; }
  int homogeneous_dimension() const { return weights_.homogeneous_dimension(); }
  GroupKind kind() const { return kind_; }
  NormKind norm_kind() const { return norm_kind_; }
  /// n for H^n, 0 otherwise.
  int heisenberg_order() const { return heisenberg_order_; }
  const std::optional<HTypeStructure>& htype_structure() const { return htype_; }
  const std::vector<HorizontalField>& frame() const { return frame_; }
  const std::vector<Polynomial>& law() const { return law_; }
  const ScalarField& user_norm() const { return user_norm_; }

  /// First-layer and remaining coordinates (for step-two groups: v(x) and z(x)).
  auto v(const Point& x) const { return x.head(m_); }
  auto z(const Point& x) const { return x.tail(n_ - m_); }

  void check_point(const Point& x) const;

  /// Rows are the coefficient vectors of X_1, ..., X_m in the ambient basis.
  Matrix frame_matrix(const Point& x) const;

  /// D(i, l) = d_l of the i-th ambient coefficient of X_j, from the stored
  /// symbolic derivatives.
  Matrix frame_jacobian(int j, const Point& x) const;

 private:
  struct Coefficient {
    int row = 0;
    Polynomial poly;
    std::vector<std::pair<int, Polynomial>> partials;
  };

  GroupSpec() = default;
  void finalize_frame(std::vector<HorizontalField> frame);

  std::string name_;
  int n_ = 0;
  int m_ = 0;
  std::vector<int> layer_dims_;
  DilationWeights weights_;
  GroupKind kind_ = GroupKind::abelian;
  NormKind norm_kind_ = NormKind::euclidean;
  int heisenberg_order_ = 0;
  std::optional<HTypeStructure> htype_;
  std::vector<HorizontalField> frame_;
  std::vector<std::vector<Coefficient>> coefficients_;
  std::vector<Polynomial> law_;
  ScalarField user_norm_;
};

Point multiply(const GroupSpec& g, const Point& x, const Point& y);
Point inverse(const GroupSpec& g, const Point& x);
Point dilate(const GroupSpec& g, double lambda, const Point& x);

double homogeneous_norm(const GroupSpec& g, const Point& x);

/// Exact jet of the homogeneous norm. Throws DomainError at the origin.
template <int O>
Jet<O> norm_jet(const GroupSpec& g, const Point& x);

/// Jet of N^4. For the built-in norms this is a polynomial and is smooth
/// through the origin.
template <int O>
Jet<O> gauge_jet(const GroupSpec& g, const Point& x);

ScalarField norm_field(const GroupSpec& g);

/// 2^{(Q-2)/2} Gamma((Q-2)/4)^2 / pi^{Q/2}.
double folland_constant(double Q);

/// Constant c in u = c N^{2-Q}: the Folland constant on Heisenberg groups, 1 otherwise.
double fundamental_solution_constant(const GroupSpec& g);

double fundamental_solution(const GroupSpec& g, const Point& x);

/// Built-in groups: h1, h2, h3, quaternionic-h1, abelian-N.
GroupSpec builtin_group(std::string_view name);
std::vector<std::string> builtin_group_names();

}  // namespace carnot
