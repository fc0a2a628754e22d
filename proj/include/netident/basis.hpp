#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace netident {

enum class BasisKind { Monomial, Sine, Tanh, ScaledLogistic };

/// One entry of the closed dictionary catalog. Every entry vanishes at the
/// origin and has closed-form derivatives of every order.
///
///   Monomial(p)        x^p, p >= 1
///   Sine(w)            sin(w x), w > 0
///   Tanh(a)            tanh(a x), a > 0
///   ScaledLogistic(a)  a (1 / (1 + exp(-x)) - 1/2), a > 0
struct BasisFunction {
  BasisKind kind = BasisKind::Monomial;
  double param = 1.0;

  static BasisFunction monomial(int power);
  static BasisFunction sine(double frequency);
  static BasisFunction tanh(double gain);
  static BasisFunction logistic(double gain);

  /// Parses the `mono:p`, `sin:w`, `tanh:a`, `logi:a` syntax.
  static BasisFunction parse(std::string_view text);
  std::string to_string() const;

  /// True for the identity monomial x.
  bool is_identity() const noexcept { return kind == BasisKind::Monomial && param == 1.0; }

  friend bool operator==(const BasisFunction&, const BasisFunction&) = default;
};

double eval(const BasisFunction& b, double x);

/// k-th derivative of `b` at `x`; k == 0 is the value itself.
double deriv_k(const BasisFunction& b, double x, int k);

std::vector<BasisFunction> parse_basis_list(std::string_view text);
std::string format_basis_list(std::span<const BasisFunction> basis);

/// f(x) = sum_l alpha_l phi_l(x).
struct EdgeFunction {
  std::vector<BasisFunction> basis;
  std::vector<double> coefficients;

  EdgeFunction() = default;
  EdgeFunction(std::vector<BasisFunction> basis, std::vector<double> coefficients);

  double operator()(double x) const { return deriv(x, 0); }
  double deriv(double x, int k) const;
};

double edge_eval(const EdgeFunction& f, double x);
double edge_deriv_k(const EdgeFunction& f, double x, int k);

}  // namespace netident
