#include "netident/model.hpp"

#include <algorithm>

#include "netident/errors.hpp"
#include "netident/graph.hpp"

namespace netident {

NetworkModel NetworkModel::from_truth(const NetworkSpec& spec) {
  std::vector<std::vector<double>> coeffs;
  coeffs.reserve(spec.edges.size());
  for (std::size_t e = 0; e < spec.edges.size(); ++e) coeffs.push_back(spec.true_function(e).coefficients);
  return with_coefficients(spec, coeffs);
}

NetworkModel NetworkModel::with_coefficients(const NetworkSpec& spec, const std::vector<std::vector<double>>& coeffs) {
  if (coeffs.size() != spec.edges.size())
    throw Error(ErrorCode::DictionaryMismatch, "one coefficient vector per edge expected");
  NetworkModel model;
  model.node_count = spec.node_count;
  model.topo_order = validate(spec);
  model.links.reserve(spec.edges.size());
  for (std::size_t e = 0; e < spec.edges.size(); ++e)
    model.links.push_back({spec.edges[e].tail, spec.edges[e].head, EdgeFunction(spec.edges[e].basis, coeffs[e])});
  return model;
}

void NetworkModel::rhs(std::span<const double> x, std::span<const double> u, std::span<double> dx) const {
  if (u.empty()) {
    std::fill(dx.begin(), dx.end(), 0.0);
  } else {
    std::copy(u.begin(), u.end(), dx.begin());
  }
  for (const auto& l : links) dx[static_cast<std::size_t>(l.head)] += l.function(x[static_cast<std::size_t>(l.tail)]);
}

}  // namespace netident
