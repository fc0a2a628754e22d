#pragma once

#include <string>
#include <vector>

#include "netident/network.hpp"

namespace netident {

/// Checks every structural invariant of a network and returns a topological
/// order (smallest ready node first). Throws Error with CycleDetected,
/// Disconnected, DuplicateEdge, SelfLoop, EmptyDictionary,
/// BasisNonzeroAtOrigin or NotPurelyNonlinear.
std::vector<int> validate(const NetworkSpec& spec);

std::vector<int> sinks(const NetworkSpec& spec);
std::vector<int> sources(const NetworkSpec& spec);

/// Shortest directed path length (in edges) from every node to `target`;
/// -1 where `target` is unreachable.
std::vector<int> distances_to(const NetworkSpec& spec, int target);

/// All directed paths from `from` to `to`, each as a node sequence.
std::vector<std::vector<int>> enumerate_paths(const NetworkSpec& spec, int from, int to);

/// A set of >= 2 equal-length directed paths from `source` to a sink that
/// share no intermediate node.
struct ParallelGroup {
  int source = 0;
  int length = 0;
  std::vector<std::vector<int>> paths;  // node sequences source..sink, sorted

  friend bool operator==(const ParallelGroup&, const ParallelGroup&) = default;
};

/// Maximal parallel groups ending in `sink`, sorted by (source, length, paths).
std::vector<ParallelGroup> parallel_path_groups(const NetworkSpec& spec, int sink);

struct Hazard {
  int sink = 0;
  ParallelGroup group;
  std::vector<int> edges;  // indistinguishable first edges
  std::string message;
};

/// Parallel groups whose downstream edges only carry the identity monomial
/// and whose first edges share a basis function: their first edges can be
/// shifted by opposite multiples of any common term without changing the
/// sink, so they cannot be told apart.
std::vector<Hazard> linearity_hazard(const NetworkSpec& spec);

struct MeasurementRequirement {
  std::vector<int> nodes;
  std::vector<Hazard> warnings;
};

/// The sinks; for class F_Z networks the linearity hazards ride along.
MeasurementRequirement required_measurements(const NetworkSpec& spec);

struct Stage {
  int derivative_order = 0;
  std::vector<int> edges;               // edge indices, identified jointly
  int sink = 0;
  std::vector<std::vector<int>> paths;  // designated path per stage edge: tail, head, ..., sink
  std::vector<int> nonzero_nodes;       // nodes whose initial condition is drawn
  std::vector<int> zeroed_nodes;        // everything else, held at 0
  std::vector<int> gated_edges;         // known edges on the designated paths
};

/// Order in which edges are identified. Edges at shortest distance k from
/// their sink are recovered from the k-th sink derivative; edges that would
/// contaminate each other at the same order (equal-length parallel paths)
/// form one joint stage. Throws UnmeasuredSink or UnsupportedTopology.
std::vector<Stage> identification_schedule(const NetworkSpec& spec);

std::string describe_stage(const NetworkSpec& spec, const Stage& stage);
std::string describe_path(const std::vector<int>& path);

}  // namespace netident
