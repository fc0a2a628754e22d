#include "netident/graph.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <map>
#include <numeric>
#include <queue>
#include <set>
#include <sstream>

#include "netident/errors.hpp"

namespace netident {
namespace {

std::vector<std::vector<int>> successors(const NetworkSpec& spec) {
  std::vector<std::vector<int>> out(static_cast<std::size_t>(spec.node_count));
  for (const auto& e : spec.edges) out[static_cast<std::size_t>(e.tail)].push_back(e.head);
  for (auto& s : out) std::sort(s.begin(), s.end());
  return out;
}

std::map<std::pair<int, int>, int> edge_index(const NetworkSpec& spec) {
  std::map<std::pair<int, int>, int> idx;
  for (std::size_t i = 0; i < spec.edges.size(); ++i)
    idx[{spec.edges[i].tail, spec.edges[i].head}] = static_cast<int>(i);
  return idx;
}

bool linear_only(const Edge& e) {
  return std::all_of(e.basis.begin(), e.basis.end(), [](const BasisFunction& b) { return b.is_identity(); });
}

bool share_basis(const Edge& a, const Edge& b) {
  for (const auto& x : a.basis)
    if (std::find(b.basis.begin(), b.basis.end(), x) != b.basis.end()) return true;
  return false;
}

bool intermediates_disjoint(const std::vector<int>& p, const std::vector<int>& q) {
  for (std::size_t i = 1; i + 1 < p.size(); ++i)
    for (std::size_t j = 1; j + 1 < q.size(); ++j)
      if (p[i] == q[j]) return false;
  return true;
}

// Bron-Kerbosch without pivoting; the candidate sets are tiny.
void maximal_cliques(const std::vector<std::vector<bool>>& adj, std::vector<int>& r, std::vector<int> p,
                     std::vector<int> x, std::vector<std::vector<int>>& out) {
  if (p.empty() && x.empty()) {
    out.push_back(r);
    return;
  }
  while (!p.empty()) {
    const int v = p.front();
    std::vector<int> np, nx;
    for (int w : p)
      if (adj[v][w]) np.push_back(w);
    for (int w : x)
      if (adj[v][w]) nx.push_back(w);
    r.push_back(v);
    maximal_cliques(adj, r, np, nx, out);
    r.pop_back();
    p.erase(p.begin());
    x.push_back(v);
  }
}

std::string join_nodes(const std::vector<int>& nodes, const char* sep) {
  std::string out;
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (i) out += sep;
    out += node_label(nodes[i]);
  }
  return out;
}

}  // namespace

std::vector<int> validate(const NetworkSpec& spec) {
  if (spec.node_count < 1) throw Error(ErrorCode::InvalidArgument, "network needs at least one node");
  std::set<std::pair<int, int>> seen;
  for (const auto& e : spec.edges) {
    if (e.tail < 0 || e.tail >= spec.node_count || e.head < 0 || e.head >= spec.node_count)
      throw Error(ErrorCode::InvalidArgument, "edge endpoint out of range");
    if (e.tail == e.head) throw Error(ErrorCode::SelfLoop, "self-loop on node " + node_label(e.tail));
    if (!seen.insert({e.tail, e.head}).second) throw Error(ErrorCode::DuplicateEdge, "duplicate edge " + edge_label(e));
    if (e.basis.empty()) throw Error(ErrorCode::EmptyDictionary, "edge " + edge_label(e) + " has no basis functions");
    for (const auto& b : e.basis)
      if (eval(b, 0.0) != 0.0)
        throw Error(ErrorCode::BasisNonzeroAtOrigin, "basis " + b.to_string() + " on edge " + edge_label(e));
    if (e.coefficients && e.coefficients->size() != e.basis.size())
      throw Error(ErrorCode::DictionaryMismatch, "edge " + edge_label(e) + " coefficient count differs from basis");
    if (spec.function_class == FunctionClass::FZNL && linear_only(e))
      throw Error(ErrorCode::NotPurelyNonlinear,
                  "class F_ZNL requires a nonlinear basis on edge " + edge_label(e));
  }
  for (int m : spec.measured)
    if (m < 0 || m >= spec.node_count) throw Error(ErrorCode::InvalidArgument, "measured node out of range");

  // Kahn's algorithm, smallest ready node first.
  const auto succ = successors(spec);
  std::vector<int> indeg(static_cast<std::size_t>(spec.node_count), 0);
  for (const auto& e : spec.edges) ++indeg[static_cast<std::size_t>(e.head)];
  std::priority_queue<int, std::vector<int>, std::greater<>> ready;
  for (int v = 0; v < spec.node_count; ++v)
    if (indeg[static_cast<std::size_t>(v)] == 0) ready.push(v);
  std::vector<int> order;
  while (!ready.empty()) {
    const int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int w : succ[static_cast<std::size_t>(v)])
      if (--indeg[static_cast<std::size_t>(w)] == 0) ready.push(w);
  }
  if (static_cast<int>(order.size()) != spec.node_count) {
    std::vector<int> stuck;
    for (int v = 0; v < spec.node_count; ++v)
      if (indeg[static_cast<std::size_t>(v)] > 0) stuck.push_back(v);
    throw Error(ErrorCode::CycleDetected, "nodes on or behind a cycle: " + join_nodes(stuck, ","));
  }

  // Weak connectivity via union-find.
  std::vector<int> parent(static_cast<std::size_t>(spec.node_count));
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> find = [&](int v) {
    while (parent[static_cast<std::size_t>(v)] != v) v = parent[static_cast<std::size_t>(v)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(v)])];
    return v;
  };
  for (const auto& e : spec.edges) parent[static_cast<std::size_t>(find(e.tail))] = find(e.head);
  for (int v = 1; v < spec.node_count; ++v)
    if (find(v) != find(0)) throw Error(ErrorCode::Disconnected, "node " + node_label(v) + " is not connected to node 1");
  return order;
}

std::vector<int> sinks(const NetworkSpec& spec) {
  std::vector<bool> has_out(static_cast<std::size_t>(spec.node_count), false);
  for (const auto& e : spec.edges) has_out[static_cast<std::size_t>(e.tail)] = true;
  std::vector<int> out;
  for (int v = 0; v < spec.node_count; ++v)
    if (!has_out[static_cast<std::size_t>(v)]) out.push_back(v);
  return out;
}

std::vector<int> sources(const NetworkSpec& spec) {
  std::vector<bool> has_in(static_cast<std::size_t>(spec.node_count), false);
  for (const auto& e : spec.edges) has_in[static_cast<std::size_t>(e.head)] = true;
  std::vector<int> out;
  for (int v = 0; v < spec.node_count; ++v)
    if (!has_in[static_cast<std::size_t>(v)]) out.push_back(v);
  return out;
}

std::vector<int> distances_to(const NetworkSpec& spec, int target) {
  std::vector<std::vector<int>> pred(static_cast<std::size_t>(spec.node_count));
  for (const auto& e : spec.edges) pred[static_cast<std::size_t>(e.head)].push_back(e.tail);
  std::vector<int> dist(static_cast<std::size_t>(spec.node_count), -1);
  std::deque<int> queue{target};
  dist[static_cast<std::size_t>(target)] = 0;
  while (!queue.empty()) {
    const int v = queue.front();
    queue.pop_front();
    for (int u : pred[static_cast<std::size_t>(v)]) {
      if (dist[static_cast<std::size_t>(u)] < 0) {
        dist[static_cast<std::size_t>(u)] = dist[static_cast<std::size_t>(v)] + 1;
        queue.push_back(u);
      }
    }
  }
  return dist;
}

std::vector<std::vector<int>> enumerate_paths(const NetworkSpec& spec, int from, int to) {
  const auto succ = successors(spec);
  std::vector<std::vector<int>> out;
  std::vector<int> current{from};
  std::function<void(int)> dfs = [&](int v) {
    if (v == to) {
      out.push_back(current);
      return;
    }
    for (int w : succ[static_cast<std::size_t>(v)]) {
      current.push_back(w);
      dfs(w);
      current.pop_back();
    }
  };
  dfs(from);
  return out;
}

std::vector<ParallelGroup> parallel_path_groups(const NetworkSpec& spec, int sink) {
  std::vector<ParallelGroup> groups;
  const auto dist = distances_to(spec, sink);
  for (int source = 0; source < spec.node_count; ++source) {
    if (source == sink || dist[static_cast<std::size_t>(source)] < 0) continue;
    std::map<int, std::vector<std::vector<int>>> by_length;
    for (auto& p : enumerate_paths(spec, source, sink)) by_length[static_cast<int>(p.size()) - 1].push_back(std::move(p));
    for (auto& [length, paths] : by_length) {
      if (paths.size() < 2) continue;
      std::sort(paths.begin(), paths.end());
      const std::size_t n = paths.size();
      std::vector<std::vector<bool>> adj(n, std::vector<bool>(n, false));
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
          adj[i][j] = i != j && intermediates_disjoint(paths[i], paths[j]);
      std::vector<int> all(n);
      std::iota(all.begin(), all.end(), 0);
      std::vector<int> r;
      std::vector<std::vector<int>> cliques;
      maximal_cliques(adj, r, all, {}, cliques);
      for (auto& c : cliques) {
        if (c.size() < 2) continue;
        std::sort(c.begin(), c.end());
        ParallelGroup g{source, length, {}};
        for (int i : c) g.paths.push_back(paths[static_cast<std::size_t>(i)]);
        groups.push_back(std::move(g));
      }
    }
  }
  std::sort(groups.begin(), groups.end(), [](const ParallelGroup& a, const ParallelGroup& b) {
    return std::tie(a.source, a.length, a.paths) < std::tie(b.source, b.length, b.paths);
  });
  return groups;
}

std::vector<Hazard> linearity_hazard(const NetworkSpec& spec) {
  std::vector<Hazard> out;
  const auto idx = edge_index(spec);
  for (int sink : sinks(spec)) {
    for (const auto& g : parallel_path_groups(spec, sink)) {
      bool mixers_linear = true;
      std::vector<int> first;
      for (const auto& p : g.paths) {
        first.push_back(idx.at({p[0], p[1]}));
        for (std::size_t i = 1; i + 1 < p.size(); ++i)
          if (!linear_only(spec.edges[static_cast<std::size_t>(idx.at({p[i], p[i + 1]}))])) mixers_linear = false;
      }
      if (!mixers_linear) continue;
      std::vector<int> clash;
      for (std::size_t i = 0; i < first.size(); ++i)
        for (std::size_t j = 0; j < first.size(); ++j)
          if (i != j && share_basis(spec.edges[static_cast<std::size_t>(first[i])], spec.edges[static_cast<std::size_t>(first[j])])) {
            clash.push_back(first[i]);
            break;
          }
      if (clash.size() < 2) continue;
      std::ostringstream msg;
      msg << "edges ";
      for (std::size_t i = 0; i < clash.size(); ++i)
        msg << (i ? ", " : "") << edge_label(spec.edges[static_cast<std::size_t>(clash[i])]);
      msg << " are indistinguishable from sink " << node_label(sink) << ": every path from node "
          << node_label(g.source) << " of length " << g.length
          << " mixes linearly, so adding c*psi to one first edge and subtracting a rescaled c*psi from another"
          << " leaves the sink unchanged; make a downstream edge nonlinear or measure an intermediate node";
      out.push_back(Hazard{sink, g, clash, msg.str()});
    }
  }
  return out;
}

MeasurementRequirement required_measurements(const NetworkSpec& spec) {
  validate(spec);
  MeasurementRequirement req;
  req.nodes = sinks(spec);
  if (spec.function_class == FunctionClass::FZ) req.warnings = linearity_hazard(spec);
  return req;
}

namespace {

// Tarjan's strongly connected components over a small dependency graph.
std::vector<std::vector<int>> strongly_connected(const std::vector<std::vector<int>>& adj) {
  const int n = static_cast<int>(adj.size());
  std::vector<int> index(static_cast<std::size_t>(n), -1), low(static_cast<std::size_t>(n), 0);
  std::vector<bool> on_stack(static_cast<std::size_t>(n), false);
  std::vector<int> stack;
  std::vector<std::vector<int>> comps;
  int counter = 0;
  std::function<void(int)> visit = [&](int v) {
    index[static_cast<std::size_t>(v)] = low[static_cast<std::size_t>(v)] = counter++;
    stack.push_back(v);
    on_stack[static_cast<std::size_t>(v)] = true;
    for (int w : adj[static_cast<std::size_t>(v)]) {
      if (index[static_cast<std::size_t>(w)] < 0) {
        visit(w);
        low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], low[static_cast<std::size_t>(w)]);
      } else if (on_stack[static_cast<std::size_t>(w)]) {
        low[static_cast<std::size_t>(v)] = std::min(low[static_cast<std::size_t>(v)], index[static_cast<std::size_t>(w)]);
      }
    }
    if (low[static_cast<std::size_t>(v)] == index[static_cast<std::size_t>(v)]) {
      std::vector<int> comp;
      int w = -1;
      do {
        w = stack.back();
        stack.pop_back();
        on_stack[static_cast<std::size_t>(w)] = false;
        comp.push_back(w);
      } while (w != v);
      std::sort(comp.begin(), comp.end());
      comps.push_back(std::move(comp));
    }
  };
  for (int v = 0; v < n; ++v)
    if (index[static_cast<std::size_t>(v)] < 0) visit(v);
  return comps;
}

}  // namespace

std::vector<Stage> identification_schedule(const NetworkSpec& spec) {
  validate(spec);
  const auto sink_list = sinks(spec);
  std::vector<int> unmeasured;
  for (int s : sink_list)
    if (!std::binary_search(spec.measured.begin(), spec.measured.end(), s)) unmeasured.push_back(s);
  if (!unmeasured.empty())
    throw Error(ErrorCode::UnmeasuredSink, "sink(s) " + join_nodes(unmeasured, ",") + " must be measured");

  const std::size_t n_edges = spec.edges.size();
  std::map<int, std::vector<int>> dist;  // sink -> distance of every node
  for (int s : sink_list) dist[s] = distances_to(spec, s);
  auto order_to = [&](std::size_t e, int s) {
    const int d = dist.at(s)[static_cast<std::size_t>(spec.edges[e].head)];
    return d < 0 ? -1 : d + 1;
  };

  // Each edge is assigned the sink that sees it at the lowest derivative order.
  std::vector<int> edge_sink(n_edges, -1), edge_order(n_edges, -1);
  std::vector<std::vector<int>> edge_path(n_edges);
  const auto succ = successors(spec);
  for (std::size_t e = 0; e < n_edges; ++e) {
    for (int s : sink_list) {
      const int m = order_to(e, s);
      if (m > 0 && (edge_order[e] < 0 || m < edge_order[e])) {
        edge_order[e] = m;
        edge_sink[e] = s;
      }
    }
    const auto& d = dist.at(edge_sink[e]);
    std::vector<int> path{spec.edges[e].tail, spec.edges[e].head};
    while (path.back() != edge_sink[e]) {
      const int cur = path.back();
      for (int w : succ[static_cast<std::size_t>(cur)])
        if (d[static_cast<std::size_t>(w)] == d[static_cast<std::size_t>(cur)] - 1) {
          path.push_back(w);
          break;
        }
    }
    edge_path[e] = std::move(path);
  }

  auto nonzero_of = [](const std::vector<std::vector<int>>& paths) {
    std::set<int> nodes;
    for (const auto& p : paths) nodes.insert(p.begin(), p.end() - 1);
    return nodes;
  };

  std::vector<Stage> schedule;
  std::vector<bool> known(n_edges, false);
  const int max_order = n_edges ? *std::max_element(edge_order.begin(), edge_order.end()) : 0;
  const auto idx = edge_index(spec);

  for (int m = 1; m <= max_order; ++m) {
    std::vector<int> level;
    for (std::size_t e = 0; e < n_edges; ++e)
      if (edge_order[e] == m) level.push_back(static_cast<int>(e));
    if (level.empty()) continue;

    // e depends on f when f is still unknown, enters the m-th derivative of
    // e's sink, and starts from a node that e's stage must excite.
    std::vector<std::vector<int>> adj(level.size());
    for (std::size_t i = 0; i < level.size(); ++i) {
      const auto e = static_cast<std::size_t>(level[i]);
      const auto excited = nonzero_of({edge_path[e]});
      for (std::size_t j = 0; j < level.size(); ++j) {
        const auto f = static_cast<std::size_t>(level[j]);
        if (i != j && excited.count(spec.edges[f].tail) && order_to(f, edge_sink[e]) == m)
          adj[i].push_back(static_cast<int>(j));
      }
    }
    const auto comps = strongly_connected(adj);

    // Condensation, dependencies first; ties go to the lexicographically
    // smallest (tail, head) edge of the component.
    const std::size_t nc = comps.size();
    std::vector<int> comp_of(level.size());
    for (std::size_t c = 0; c < nc; ++c)
      for (int i : comps[c]) comp_of[static_cast<std::size_t>(i)] = static_cast<int>(c);
    std::vector<std::set<int>> deps(nc);
    for (std::size_t i = 0; i < level.size(); ++i)
      for (int j : adj[i])
        if (comp_of[i] != comp_of[static_cast<std::size_t>(j)]) deps[static_cast<std::size_t>(comp_of[i])].insert(comp_of[static_cast<std::size_t>(j)]);
    auto comp_key = [&](std::size_t c) {
      std::pair<int, int> best{spec.node_count, spec.node_count};
      for (int i : comps[c]) {
        const auto& ed = spec.edges[static_cast<std::size_t>(level[static_cast<std::size_t>(i)])];
        best = std::min(best, std::pair<int, int>{ed.tail, ed.head});
      }
      return best;
    };
    std::vector<bool> done(nc, false);
    for (std::size_t emitted = 0; emitted < nc; ++emitted) {
      std::size_t pick = nc;
      for (std::size_t c = 0; c < nc; ++c) {
        if (done[c]) continue;
        const bool ready = std::all_of(deps[c].begin(), deps[c].end(), [&](int d) { return done[static_cast<std::size_t>(d)]; });
        if (ready && (pick == nc || comp_key(c) < comp_key(pick))) pick = c;
      }
      done[pick] = true;

      Stage stage;
      stage.derivative_order = m;
      for (int i : comps[pick]) stage.edges.push_back(level[static_cast<std::size_t>(i)]);
      std::sort(stage.edges.begin(), stage.edges.end(), [&](int a, int b) {
        return std::pair{spec.edges[static_cast<std::size_t>(a)].tail, spec.edges[static_cast<std::size_t>(a)].head} <
               std::pair{spec.edges[static_cast<std::size_t>(b)].tail, spec.edges[static_cast<std::size_t>(b)].head};
      });
      stage.sink = edge_sink[static_cast<std::size_t>(stage.edges.front())];

      if (stage.edges.size() == 1) {
        stage.paths.push_back(edge_path[static_cast<std::size_t>(stage.edges.front())]);
      } else {
        const int tail = spec.edges[static_cast<std::size_t>(stage.edges.front())].tail;
        std::set<int> wanted(stage.edges.begin(), stage.edges.end());
        for (int e : stage.edges)
          if (spec.edges[static_cast<std::size_t>(e)].tail != tail || edge_sink[static_cast<std::size_t>(e)] != stage.sink)
            throw Error(ErrorCode::UnsupportedTopology,
                        "edges that must be identified jointly do not share a source and sink");
        const ParallelGroup* match = nullptr;
        const auto groups = parallel_path_groups(spec, stage.sink);
        for (const auto& g : groups) {
          if (g.source != tail || g.length != m) continue;
          std::set<int> firsts;
          for (const auto& p : g.paths) firsts.insert(idx.at({p[0], p[1]}));
          if (firsts == wanted) {
            match = &g;
            break;
          }
        }
        if (!match) {
          std::string names;
          for (int e : stage.edges) names += (names.empty() ? "" : ", ") + edge_label(spec.edges[static_cast<std::size_t>(e)]);
          throw Error(ErrorCode::UnsupportedTopology,
                      "edges " + names + " reach sink " + node_label(stage.sink) +
                          " at the same derivative order but not through node-disjoint parallel paths");
        }
        for (int e : stage.edges)
          for (const auto& p : match->paths)
            if (p[1] == spec.edges[static_cast<std::size_t>(e)].head) stage.paths.push_back(p);
      }

      const auto excited = nonzero_of(stage.paths);
      stage.nonzero_nodes.assign(excited.begin(), excited.end());
      for (int v = 0; v < spec.node_count; ++v)
        if (!excited.count(v)) stage.zeroed_nodes.push_back(v);
      std::set<int> gated;
      for (const auto& p : stage.paths)
        for (std::size_t i = 1; i + 1 < p.size(); ++i) gated.insert(idx.at({p[i], p[i + 1]}));
      stage.gated_edges.assign(gated.begin(), gated.end());

      // Every edge entering the m-th sink derivative from an excited node has
      // to be known already or be part of this stage.
      for (std::size_t f = 0; f < n_edges; ++f) {
        if (known[f] || std::find(stage.edges.begin(), stage.edges.end(), static_cast<int>(f)) != stage.edges.end())
          continue;
        const int o = order_to(f, stage.sink);
        if (o > 0 && o <= m && excited.count(spec.edges[f].tail))
          throw Error(ErrorCode::UnsupportedTopology,
                      "edge " + edge_label(spec.edges[f]) + " would contaminate the stage for " +
                          edge_label(spec.edges[static_cast<std::size_t>(stage.edges.front())]));
      }
      for (int e : stage.edges) known[static_cast<std::size_t>(e)] = true;
      schedule.push_back(std::move(stage));
    }
  }
  return schedule;
}

std::string describe_path(const std::vector<int>& path) { return join_nodes(path, "-"); }

std::string describe_stage(const NetworkSpec& spec, const Stage& stage) {
  std::ostringstream out;
  out << "order " << stage.derivative_order << " at sink " << node_label(stage.sink) << ": ";
  for (std::size_t i = 0; i < stage.edges.size(); ++i)
    out << (i ? ", " : "") << edge_label(spec.edges[static_cast<std::size_t>(stage.edges[i])]);
  if (stage.edges.size() > 1) out << " (joint)";
  out << "; excite {" << join_nodes(stage.nonzero_nodes, ",") << "}";
  return out.str();
}

}  // namespace netident
