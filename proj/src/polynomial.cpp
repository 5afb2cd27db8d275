#include "carnot/polynomial.hpp"

#include <algorithm>

#include "carnot/types.hpp"

namespace carnot {

Polynomial Polynomial::constant(int num_vars, double c) {
  Polynomial p(num_vars);
  p.add_term(c, std::vector<int>(num_vars, 0));
  return p;
}

Polynomial Polynomial::variable(int num_vars, int index, double coeff) {
  if (index < 0 || index >= num_vars) throw InvalidArgument("polynomial variable index out of range");
  Polynomial p(num_vars);
  std::vector<int> powers(num_vars, 0);
  powers[index] = 1;
  p.add_term(coeff, std::move(powers));
  return p;
}

void Polynomial::add_term(double coeff, std::vector<int> powers) {
  if (static_cast<int>(powers.size()) != num_vars_) {
    throw InvalidArgument("monomial exponent vector has wrong length");
  }
  if (std::any_of(powers.begin(), powers.end(), [](int p) { return p < 0; })) {
    throw InvalidArgument("negative monomial exponent");
  }
  if (coeff == 0.0) return;
  auto it = std::find_if(terms_.begin(), terms_.end(), [&](const Term& t) { return t.powers == powers; });
  if (it == terms_.end()) {
    terms_.push_back({coeff, std::move(powers)});
    return;
  }
  it->coeff += coeff;
  if (it->coeff == 0.0) terms_.erase(it);
}

double Polynomial::operator()(std::span<const double> x) const {
  if (static_cast<int>(x.size()) != num_vars_) throw InvalidArgument("polynomial evaluated at wrong dimension");
  double sum = 0.0;
  for (const auto& t : terms_) {
    double m = t.coeff;
    for (int i = 0; i < num_vars_; ++i) {
      for (int k = 0; k < t.powers[i]; ++k) m *= x[i];
    }
    sum += m;
  }
  return sum;
}

Polynomial Polynomial::derivative(int var) const {
  if (var < 0 || var >= num_vars_) throw InvalidArgument("derivative variable out of range");
  Polynomial d(num_vars_);
  for (const auto& t : terms_) {
    if (t.powers[var] == 0) continue;
    auto powers = t.powers;
    const double c = t.coeff * powers[var];
    --powers[var];
    d.add_term(c, std::move(powers));
  }
  return d;
}

std::optional<int> Polynomial::weighted_degree(std::span<const int> weights) const {
  if (static_cast<int>(weights.size()) != num_vars_) throw InvalidArgument("weight vector has wrong length");
  std::optional<int> degree;
  for (const auto& t : terms_) {
    int d = 0;
    for (int i = 0; i < num_vars_; ++i) d += weights[i] * t.powers[i];
    if (degree && *degree != d) return std::nullopt;
    degree = d;
  }
  return degree.value_or(0);
}

Polynomial Polynomial::operator+(const Polynomial& other) const {
  if (other.num_vars_ != num_vars_) throw InvalidArgument("adding polynomials in different variables");
  Polynomial r = *this;
  for (const auto& t : other.terms_) r.add_term(t.coeff, t.powers);
  return r;
}

Polynomial Polynomial::operator*(const Polynomial& other) const {
  if (other.num_vars_ != num_vars_) throw InvalidArgument("multiplying polynomials in different variables");
  Polynomial r(num_vars_);
  for (const auto& a : terms_) {
    for (const auto& b : other.terms_) {
      std::vector<int> powers(num_vars_);
      for (int i = 0; i < num_vars_; ++i) powers[i] = a.powers[i] + b.powers[i];
      r.add_term(a.coeff * b.coeff, std::move(powers));
    }
  }
  return r;
}

Polynomial Polynomial::operator*(double s) const {
  Polynomial r(num_vars_);
  for (const auto& t : terms_) r.add_term(t.coeff * s, t.powers);
  return r;
}

}  // namespace carnot
