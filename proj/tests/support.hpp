#pragma once

// Generators and hand-written oracles shared by the unit tests and the
// acceptance binary.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include "netident/graph.hpp"
#include "netident/network.hpp"

namespace support {

inline netident::NetworkSpec load(const std::string& name) {
  return netident::load_network(std::string(NETIDENT_SPEC_DIR) + "/" + name);
}

// Coefficient bounded away from zero so that gating always has room.
inline double signed_coefficient(std::mt19937_64& gen) {
  std::uniform_real_distribution<double> mag(0.2, 1.0);
  std::bernoulli_distribution sign(0.5);
  return sign(gen) ? mag(gen) : -mag(gen);
}

// Random tree (as an undirected graph) with random edge orientations and
// monomial dictionaries x, ..., x^d, d <= 4.
inline netident::NetworkSpec random_tree(std::mt19937_64& gen, int max_nodes) {
  using namespace netident;
  std::uniform_int_distribution<int> size(2, max_nodes);
  std::uniform_int_distribution<int> degree(1, 4);
  std::bernoulli_distribution flip(0.5);
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  NetworkSpec spec;
  spec.node_count = size(gen);
  spec.function_class = FunctionClass::FZ;
  for (int v = 1; v < spec.node_count; ++v) {
    std::uniform_int_distribution<int> parent(0, v - 1);
    const int p = parent(gen);
    Edge e;
    if (flip(gen)) {
      e.tail = p;
      e.head = v;
    } else {
      e.tail = v;
      e.head = p;
    }
    const int d = degree(gen);
    std::vector<double> c;
    for (int k = 1; k <= d; ++k) {
      e.basis.push_back(BasisFunction::monomial(k));
      c.push_back(k == 1 ? signed_coefficient(gen) : coef(gen));
    }
    e.coefficients = c;
    spec.edges.push_back(e);
  }
  spec.measured = sinks(spec);
  return spec;
}

// Path 1 -> ... -> n with the given dictionary and random coefficients.
inline netident::NetworkSpec random_path(std::mt19937_64& gen, int n,
                                         const std::vector<netident::BasisFunction>& basis) {
  using namespace netident;
  std::uniform_real_distribution<double> coef(-1.0, 1.0);
  NetworkSpec spec;
  spec.node_count = n;
  spec.function_class = FunctionClass::FZNL;
  for (int i = 0; i + 1 < n; ++i) {
    std::vector<double> c(basis.size());
    for (auto& v : c) v = coef(gen);
    spec.edges.push_back({i, i + 1, basis, c});
  }
  spec.measured = {n - 1};
  return spec;
}

inline std::vector<double> random_vector(std::mt19937_64& gen, std::size_t n, double r) {
  std::uniform_real_distribution<double> pick(-r, r);
  std::vector<double> x(n);
  for (auto& v : x) v = pick(gen);
  return x;
}

// Copy of `spec` with node v renamed perm[v].
inline netident::NetworkSpec relabel(const netident::NetworkSpec& spec, const std::vector<int>& perm) {
  auto out = spec;
  for (auto& e : out.edges) {
    e.tail = perm[e.tail];
    e.head = perm[e.head];
  }
  for (auto& m : out.measured) m = perm[m];
  std::sort(out.measured.begin(), out.measured.end());
  return out;
}

// Dormand-Prince 5(4) with standard step control; the reference solution.
using Vec = std::vector<double>;

inline Vec dopri(const std::function<Vec(const Vec&)>& f, Vec x, double t_end, double tol) {
  static constexpr double a[7][6] = {
      {},
      {1.0 / 5},
      {3.0 / 40, 9.0 / 40},
      {44.0 / 45, -56.0 / 15, 32.0 / 9},
      {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
      {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
      {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
  static constexpr double b5[7] = {35.0 / 384, 0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84, 0};
  static constexpr double b4[7] = {5179.0 / 57600, 0, 7571.0 / 16695, 393.0 / 640, -92097.0 / 339200, 187.0 / 2100,
                                   1.0 / 40};
  double t = 0.0, h = 1e-3;
  while (t < t_end) {
    h = std::min(h, t_end - t);
    const std::size_t n = x.size();
    std::array<Vec, 7> k;
    for (int s = 0; s < 7; ++s) {
      Vec y = x;
      for (int j = 0; j < s; ++j)
        for (std::size_t i = 0; i < n; ++i) y[i] += h * a[s][j] * k[j][i];
      k[s] = f(y);
    }
    Vec hi = x, lo = x;
    for (int s = 0; s < 7; ++s)
      for (std::size_t i = 0; i < n; ++i) {
        hi[i] += h * b5[s] * k[s][i];
        lo[i] += h * b4[s] * k[s][i];
      }
    double err = 0.0;
    for (std::size_t i = 0; i < n; ++i) err = std::max(err, std::abs(hi[i] - lo[i]) / (tol * (1.0 + std::abs(hi[i]))));
    if (err <= 1.0) {
      t += h;
      x = hi;
    }
    h *= std::clamp(0.9 * std::pow(std::max(err, 1e-10), -0.2), 0.2, 5.0);
  }
  return x;
}

}  // namespace support
