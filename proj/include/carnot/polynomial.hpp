#pragma once

#include <optional>
#include <span>
#include <vector>

namespace carnot {

/// Sparse multivariate polynomial with real coefficients.
class Polynomial {
 public:
  struct Term {
    double coeff = 0.0;
    std::vector<int> powers;
  };

  explicit Polynomial(int num_vars = 0) : num_vars_(num_vars) {}

  static Polynomial constant(int num_vars, double c);
  static Polynomial variable(int num_vars, int index, double coeff = 1.0);

  /// Adds `coeff * prod x_i^powers[i]`, merging with an existing monomial.
  void add_term(double coeff, std::vector<int> powers);

  int num_vars() const { return num_vars_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  double operator()(std::span<const double> x) const;

  Polynomial derivative(int var) const;

  /// Weighted degree sum_i w_i p_i shared by every term, or nullopt when the
  /// terms disagree. The zero polynomial reports 0.
  std::optional<int> weighted_degree(std::span<const int> weights) const;

  Polynomial operator+(const Polynomial& other) const;
  Polynomial operator*(const Polynomial& other) const;
  Polynomial operator*(double s) const;

 private:
  int num_vars_;
  std::vector<Term> terms_;
};

}  // namespace carnot
