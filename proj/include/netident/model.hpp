#pragma once

#include <span>
#include <vector>

#include "netident/basis.hpp"
#include "netident/network.hpp"

namespace netident {

/// Edge functions bound to a topology: the right-hand side
/// dx_i/dt = sum_{j -> i} f_ij(x_j) + u_i.
struct NetworkModel {
  struct Link {
    int tail = 0;
    int head = 0;
    EdgeFunction function;
  };

  int node_count = 0;
  std::vector<Link> links;
  std::vector<int> topo_order;

  /// Model driven by the true coefficients of `spec`.
  static NetworkModel from_truth(const NetworkSpec& spec);

  /// Model with explicit per-edge coefficient vectors (same order as spec.edges).
  static NetworkModel with_coefficients(const NetworkSpec& spec, const std::vector<std::vector<double>>& coeffs);

  void rhs(std::span<const double> x, std::span<const double> u, std::span<double> dx) const;
};

}  // namespace netident
