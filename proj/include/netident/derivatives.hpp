#pragma once

#include <span>
#include <vector>

#include "netident/model.hpp"
#include "netident/network.hpp"

namespace netident {

/// Savitzky-Golay fit anchored at the first sample: a degree-`degree`
/// polynomial is fitted to the first `window` samples (spacing `spacing`)
/// and differentiated at t = 0.
struct SgConfig {
  int window = 10;
  int degree = 5;
  double spacing = 0.1;

  void check() const;
};

/// Derivative estimates of orders 0..up_to at t = 0.
/// Throws InsufficientSamples or OrderTooHigh.
std::vector<double> sg_fit_at_start(std::span<const double> samples, const SgConfig& cfg, int up_to);

/// Weights w with estimate_k = w . samples[0..window); the estimator is linear.
std::vector<double> sg_start_weights(const SgConfig& cfg, int order);

/// Truncated Taylor coefficients of every node state at t = 0:
/// x_i(t) = sum_k coeffs[i][k] t^k + O(t^(order+1)).
struct Jet {
  int order = 0;
  std::vector<std::vector<double>> coeffs;
};

Jet exact_jet(const NetworkModel& model, std::span<const double> x0, std::span<const double> u, int order);
Jet exact_jet(const NetworkSpec& spec, std::span<const double> x0, std::span<const double> u, int order);

/// k! * coeffs[node][k] for k = 0..order.
std::vector<double> jet_to_derivatives(const Jet& jet, int node);

/// Inverse of jet_to_derivatives for one node.
std::vector<double> derivatives_to_coefficients(std::span<const double> derivatives);

namespace series {

/// Truncated product of two power series with `order + 1` terms.
std::vector<double> multiply(std::span<const double> a, std::span<const double> b, int order);

/// Series of f(x(t)) given the series of x(t), truncated at `order`.
std::vector<double> compose(const EdgeFunction& f, std::span<const double> x, int order);

}  // namespace series

}  // namespace netident
