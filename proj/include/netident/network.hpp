#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "netident/basis.hpp"

namespace netident {

enum class FunctionClass { FZ, FZNL };

/// Directed edge tail -> head. The edge function of node `head` reads the
/// state of node `tail`. Node indices are zero-based in memory and
/// one-based in files and printed output.
struct Edge {
  int tail = 0;
  int head = 0;
  std::vector<BasisFunction> basis;
  std::optional<std::vector<double>> coefficients;
};

/// Experiment settings a network file may carry with it (`plan` line).
struct PlanHints {
  std::optional<int> experiments;
  std::optional<double> period;
  std::optional<int> samples;
  std::optional<double> sigma;
  std::optional<int> window;
  std::optional<int> degree;
  std::optional<double> ic_low;
  std::optional<double> ic_high;
};

struct NetworkSpec {
  int node_count = 0;
  std::vector<Edge> edges;
  std::vector<int> measured;  // sorted, unique
  FunctionClass function_class = FunctionClass::FZ;
  PlanHints plan;

  bool has_truth() const;
  EdgeFunction true_function(std::size_t edge) const;
  std::size_t coefficient_count() const;
};

std::string edge_label(const Edge& e);
std::string node_label(int node);

/// Line-oriented network format (one directive per line, `#` comments):
///
///   nodes N
///   class F_Z | F_ZNL
///   edge TAIL HEAD basis=<list> [coeff=<list>]
///   measured i,j,...
///   plan [K=..] [h=..] [samples=..] [sigma=..] [window=..] [degree=..] [ic=lo,hi]
///
/// Unknown directives or keys are rejected with the offending line number.
NetworkSpec parse_network(std::istream& in, const std::string& source = "<input>");
NetworkSpec parse_network_text(const std::string& text);
NetworkSpec load_network(const std::string& path);
std::string format_network(const NetworkSpec& spec);

}  // namespace netident
