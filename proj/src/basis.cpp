#include "netident/basis.hpp"

#include <charconv>
#include <cmath>
#include <numbers>
#include <sstream>

#include "netident/errors.hpp"

namespace netident {
namespace {

// Coefficients (ascending powers of y) of d^k/dx^k expressed as a polynomial
// in y, given dy/dx = r(y). Starts from p0 and applies p <- p'(y) * r(y).
std::vector<double> derivative_polynomial(std::vector<double> p, const std::vector<double>& r, int k) {
  for (int step = 0; step < k; ++step) {
    std::vector<double> dp(p.size() > 1 ? p.size() - 1 : 1, 0.0);
    for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = static_cast<double>(i) * p[i];
    std::vector<double> next(dp.size() + r.size() - 1, 0.0);
    for (std::size_t i = 0; i < dp.size(); ++i)
      for (std::size_t j = 0; j < r.size(); ++j) next[i + j] += dp[i] * r[j];
    p = std::move(next);
  }
  return p;
}

double horner(const std::vector<double>& p, double y) {
  double acc = 0.0;
  for (auto it = p.rbegin(); it != p.rend(); ++it) acc = acc * y + *it;
  return acc;
}

double parse_double(std::string_view text, std::string_view context) {
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc() || ptr != text.data() + text.size())
    throw Error(ErrorCode::Parse, "bad number '" + std::string(text) + "' in " + std::string(context));
  return value;
}

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

BasisFunction BasisFunction::monomial(int power) {
  if (power < 1) throw Error(ErrorCode::BasisNonzeroAtOrigin, "monomial power must be >= 1");
  return {BasisKind::Monomial, static_cast<double>(power)};
}

BasisFunction BasisFunction::sine(double frequency) {
  if (!(frequency > 0.0)) throw Error(ErrorCode::InvalidArgument, "sine frequency must be > 0");
  return {BasisKind::Sine, frequency};
}

BasisFunction BasisFunction::tanh(double gain) {
  if (!(gain > 0.0)) throw Error(ErrorCode::InvalidArgument, "tanh gain must be > 0");
  return {BasisKind::Tanh, gain};
}

BasisFunction BasisFunction::logistic(double gain) {
  if (!(gain > 0.0)) throw Error(ErrorCode::InvalidArgument, "logistic gain must be > 0");
  return {BasisKind::ScaledLogistic, gain};
}

BasisFunction BasisFunction::parse(std::string_view text) {
  const std::string s = trim(text);
  const auto colon = s.find(':');
  if (colon == std::string::npos)
    throw Error(ErrorCode::Parse, "basis '" + s + "' must look like kind:param");
  const std::string kind = s.substr(0, colon);
  const std::string arg = s.substr(colon + 1);
  const double value = parse_double(arg, "basis '" + s + "'");
  if (kind == "mono") {
    if (value != std::floor(value)) throw Error(ErrorCode::Parse, "monomial power must be an integer: " + s);
    return monomial(static_cast<int>(value));
  }
  if (kind == "sin") return sine(value);
  if (kind == "tanh") return tanh(value);
  if (kind == "logi") return logistic(value);
  throw Error(ErrorCode::Parse, "unknown basis kind '" + kind + "'");
}

std::string BasisFunction::to_string() const {
  std::ostringstream out;
  switch (kind) {
    case BasisKind::Monomial: out << "mono:" << static_cast<int>(param); break;
    case BasisKind::Sine: out << "sin:" << param; break;
    case BasisKind::Tanh: out << "tanh:" << param; break;
    case BasisKind::ScaledLogistic: out << "logi:" << param; break;
  }
  return out.str();
}

double eval(const BasisFunction& b, double x) { return deriv_k(b, x, 0); }

double deriv_k(const BasisFunction& b, double x, int k) {
  if (k < 0) throw Error(ErrorCode::InvalidArgument, "derivative order must be >= 0");
  switch (b.kind) {
    case BasisKind::Monomial: {
      const int p = static_cast<int>(b.param);
      if (k > p) return 0.0;
      double falling = 1.0;
      for (int i = 0; i < k; ++i) falling *= static_cast<double>(p - i);
      return falling * std::pow(x, p - k);
    }
    case BasisKind::Sine: {
      const double w = b.param;
      const double scale = std::pow(w, k);
      switch (k % 4) {
        case 0: return scale * std::sin(w * x);
        case 1: return scale * std::cos(w * x);
        case 2: return -scale * std::sin(w * x);
        default: return -scale * std::cos(w * x);
      }
    }
    case BasisKind::Tanh: {
      // y = tanh(a x), dy/d(ax) = 1 - y^2
      const double a = b.param;
      const auto p = derivative_polynomial({0.0, 1.0}, {1.0, 0.0, -1.0}, k);
      return std::pow(a, k) * horner(p, std::tanh(a * x));
    }
    case BasisKind::ScaledLogistic: {
      // s = 1/(1+e^-x), ds/dx = s - s^2
      const double s = 1.0 / (1.0 + std::exp(-x));
      const auto p = derivative_polynomial({-0.5, 1.0}, {0.0, 1.0, -1.0}, k);
      return b.param * horner(p, s);
    }
  }
  return 0.0;
}

std::vector<BasisFunction> parse_basis_list(std::string_view text) {
  std::vector<BasisFunction> out;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = text.substr(start, comma == std::string_view::npos ? std::string_view::npos : comma - start);
    if (!trim(item).empty()) out.push_back(BasisFunction::parse(item));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

std::string format_basis_list(std::span<const BasisFunction> basis) {
  std::string out;
  for (std::size_t i = 0; i < basis.size(); ++i) {
    if (i) out += ',';
    out += basis[i].to_string();
  }
  return out;
}

EdgeFunction::EdgeFunction(std::vector<BasisFunction> b, std::vector<double> c)
    : basis(std::move(b)), coefficients(std::move(c)) {
  if (basis.size() != coefficients.size())
    throw Error(ErrorCode::DictionaryMismatch, "edge function has " + std::to_string(basis.size()) +
                                                   " basis functions but " + std::to_string(coefficients.size()) +
                                                   " coefficients");
}

double EdgeFunction::deriv(double x, int k) const {
  double acc = 0.0;
  for (std::size_t l = 0; l < basis.size(); ++l)
    if (coefficients[l] != 0.0) acc += coefficients[l] * deriv_k(basis[l], x, k);
  return acc;
}

double edge_eval(const EdgeFunction& f, double x) { return f.deriv(x, 0); }
double edge_deriv_k(const EdgeFunction& f, double x, int k) { return f.deriv(x, k); }

}  // namespace netident
