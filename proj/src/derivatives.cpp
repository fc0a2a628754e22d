#include "netident/derivatives.hpp"

#include <Eigen/Dense>
#include <cmath>

#include "netident/errors.hpp"

namespace netident {
namespace {

double factorial(int k) {
  double f = 1.0;
  for (int i = 2; i <= k; ++i) f *= i;
  return f;
}

// Vandermonde in the sample index s = t / h; rescaling keeps it well conditioned.
Eigen::MatrixXd start_vandermonde(const SgConfig& cfg) {
  Eigen::MatrixXd v(cfg.window, cfg.degree + 1);
  for (int s = 0; s < cfg.window; ++s) {
    double p = 1.0;
    for (int j = 0; j <= cfg.degree; ++j) {
      v(s, j) = p;
      p *= s;
    }
  }
  return v;
}

}  // namespace

void SgConfig::check() const {
  if (degree < 0) throw Error(ErrorCode::InvalidArgument, "polynomial degree must be >= 0");
  if (window < degree + 1) throw Error(ErrorCode::InvalidArgument, "window must be at least degree + 1");
  if (!(spacing > 0.0)) throw Error(ErrorCode::InvalidArgument, "sample spacing must be > 0");
}

std::vector<double> sg_fit_at_start(std::span<const double> samples, const SgConfig& cfg, int up_to) {
  cfg.check();
  if (static_cast<int>(samples.size()) < cfg.window)
    throw Error(ErrorCode::InsufficientSamples, "need " + std::to_string(cfg.window) + " samples, got " +
                                                    std::to_string(samples.size()));
  if (up_to < 0 || up_to > cfg.degree)
    throw Error(ErrorCode::OrderTooHigh, "derivative order " + std::to_string(up_to) + " exceeds polynomial degree " +
                                             std::to_string(cfg.degree));
  const Eigen::MatrixXd v = start_vandermonde(cfg);
  const Eigen::VectorXd y = Eigen::Map<const Eigen::VectorXd>(samples.data(), cfg.window);
  const Eigen::VectorXd c = v.colPivHouseholderQr().solve(y);
  std::vector<double> out(static_cast<std::size_t>(up_to) + 1);
  for (int k = 0; k <= up_to; ++k) out[static_cast<std::size_t>(k)] = factorial(k) * c(k) / std::pow(cfg.spacing, k);
  return out;
}

std::vector<double> sg_start_weights(const SgConfig& cfg, int order) {
  cfg.check();
  if (order < 0 || order > cfg.degree) throw Error(ErrorCode::OrderTooHigh, "derivative order exceeds polynomial degree");
  const Eigen::MatrixXd v = start_vandermonde(cfg);
  // Row `order` of the pseudo-inverse, scaled to physical time.
  const Eigen::MatrixXd pinv = v.colPivHouseholderQr().solve(Eigen::MatrixXd::Identity(cfg.window, cfg.window));
  std::vector<double> w(static_cast<std::size_t>(cfg.window));
  const double scale = factorial(order) / std::pow(cfg.spacing, order);
  for (int s = 0; s < cfg.window; ++s) w[static_cast<std::size_t>(s)] = scale * pinv(order, s);
  return w;
}

namespace series {

std::vector<double> multiply(std::span<const double> a, std::span<const double> b, int order) {
  std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
  for (int i = 0; i <= order && i < static_cast<int>(a.size()); ++i) {
    if (a[static_cast<std::size_t>(i)] == 0.0) continue;
    for (int j = 0; i + j <= order && j < static_cast<int>(b.size()); ++j)
      out[static_cast<std::size_t>(i + j)] += a[static_cast<std::size_t>(i)] * b[static_cast<std::size_t>(j)];
  }
  return out;
}

std::vector<double> compose(const EdgeFunction& f, std::span<const double> x, int order) {
  // f(x0 + d(t)) = sum_n f^(n)(x0) / n! d(t)^n with d(0) = 0, so d^n starts at t^n.
  std::vector<double> out(static_cast<std::size_t>(order) + 1, 0.0);
  const double x0 = x.empty() ? 0.0 : x[0];
  out[0] = f(x0);
  std::vector<double> d(static_cast<std::size_t>(order) + 1, 0.0);
  for (int k = 1; k <= order && k < static_cast<int>(x.size()); ++k) d[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(k)];
  std::vector<double> power = d;
  double inv_fact = 1.0;
  for (int n = 1; n <= order; ++n) {
    inv_fact /= n;
    const double c = f.deriv(x0, n) * inv_fact;
    if (c != 0.0)
      for (int k = n; k <= order; ++k) out[static_cast<std::size_t>(k)] += c * power[static_cast<std::size_t>(k)];
    if (n < order) power = multiply(power, d, order);
  }
  return out;
}

}  // namespace series

Jet exact_jet(const NetworkModel& model, std::span<const double> x0, std::span<const double> u, int order) {
  if (order < 0) throw Error(ErrorCode::InvalidArgument, "jet order must be >= 0");
  const auto n = static_cast<std::size_t>(model.node_count);
  if (x0.size() != n) throw Error(ErrorCode::InvalidArgument, "initial state has wrong dimension");
  if (!u.empty() && u.size() != n) throw Error(ErrorCode::InvalidArgument, "input vector has wrong dimension");

  std::vector<std::vector<const NetworkModel::Link*>> incoming(n);
  for (const auto& l : model.links) incoming[static_cast<std::size_t>(l.head)].push_back(&l);

  Jet jet;
  jet.order = order;
  jet.coeffs.assign(n, std::vector<double>(static_cast<std::size_t>(order) + 1, 0.0));
  for (int node : model.topo_order) {
    auto& c = jet.coeffs[static_cast<std::size_t>(node)];
    c[0] = x0[static_cast<std::size_t>(node)];
    if (order == 0) continue;
    // Series of the right-hand side; it only needs terms up to order - 1.
    std::vector<double> rate(static_cast<std::size_t>(order), 0.0);
    if (!u.empty()) rate[0] = u[static_cast<std::size_t>(node)];
    for (const auto* l : incoming[static_cast<std::size_t>(node)]) {
      const auto s = series::compose(l->function, jet.coeffs[static_cast<std::size_t>(l->tail)], order - 1);
      for (int k = 0; k < order; ++k) rate[static_cast<std::size_t>(k)] += s[static_cast<std::size_t>(k)];
    }
    for (int k = 0; k < order; ++k) c[static_cast<std::size_t>(k) + 1] = rate[static_cast<std::size_t>(k)] / (k + 1);
  }
  return jet;
}

Jet exact_jet(const NetworkSpec& spec, std::span<const double> x0, std::span<const double> u, int order) {
  return exact_jet(NetworkModel::from_truth(spec), x0, u, order);
}

std::vector<double> jet_to_derivatives(const Jet& jet, int node) {
  const auto& c = jet.coeffs.at(static_cast<std::size_t>(node));
  std::vector<double> out(c.size());
  for (std::size_t k = 0; k < c.size(); ++k) out[k] = factorial(static_cast<int>(k)) * c[k];
  return out;
}

std::vector<double> derivatives_to_coefficients(std::span<const double> derivatives) {
  std::vector<double> out(derivatives.size());
  for (std::size_t k = 0; k < derivatives.size(); ++k) out[k] = derivatives[k] / factorial(static_cast<int>(k));
  return out;
}

}  // namespace netident
