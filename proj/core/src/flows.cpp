#include "gilbert/flows.hpp"

#include <cmath>
#include <string>

namespace gilbert {

std::vector<DirectedEdge> assign_flows(const SteinerTopology& topo, std::span<const double> supply) {
  if (!is_tree(topo)) throw InvalidTopology("flows require a tree topology");
  const int n = topo.vertex_count();
  if (static_cast<int>(supply.size()) != n) throw InvalidInput("supply vector size does not match the topology");
  for (int v = 0; v < n; ++v) {
    const double s = supply[static_cast<size_t>(v)];
    const bool is_source = v < topo.sink();
    if (is_source && (!(s > 0.0) || !std::isfinite(s))) {
      throw InvalidInput("source " + std::to_string(v) + " needs a positive finite flow");
    }
    if (!is_source && s != 0.0) throw InvalidInput("only sources may carry supply");
  }

  std::vector<std::vector<int>> adj(static_cast<size_t>(n));
  for (const auto& [a, b] : topo.edges) {
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }

  // Breadth-first order from the sink; reversing it visits every vertex after
  // all of its upstream vertices.
  std::vector<int> parent(static_cast<size_t>(n), -1);
  std::vector<int> order{topo.sink()};
  parent[static_cast<size_t>(topo.sink())] = topo.sink();
  for (size_t i = 0; i < order.size(); ++i) {
    for (int u : adj[static_cast<size_t>(order[i])]) {
      if (parent[static_cast<size_t>(u)] == -1) {
        parent[static_cast<size_t>(u)] = order[i];
        order.push_back(u);
      }
    }
  }
  std::vector<double> subtree(supply.begin(), supply.end());
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    if (*it == topo.sink()) continue;
    subtree[static_cast<size_t>(parent[static_cast<size_t>(*it)])] += subtree[static_cast<size_t>(*it)];
  }

  std::vector<DirectedEdge> out;
  out.reserve(topo.edges.size());
  for (const auto& [a, b] : topo.edges) {
    const int tail = parent[static_cast<size_t>(a)] == b ? a : b;
    const int head = tail == a ? b : a;
    out.push_back({tail, head, subtree[static_cast<size_t>(tail)]});
  }
  return out;
}

EmbeddedArborescence embed(const NormSpace& space, const WeightFunction& weight, const SteinerTopology& topo,
                           std::span<const Vector> positions, std::span<const double> supply) {
  const int n = topo.vertex_count();
  if (static_cast<int>(positions.size()) != n) throw InvalidInput("one position per vertex is required");
  EmbeddedArborescence arb{space, weight, {}, {}};
  arb.vertices.reserve(static_cast<size_t>(n));
  for (int v = 0; v < n; ++v) {
    const Role role = v < topo.sink() ? Role::kSource : (v == topo.sink() ? Role::kSink : Role::kSteiner);
    if (positions[static_cast<size_t>(v)].size() != space.dim()) throw InvalidInput("position dimension mismatch");
    arb.vertices.push_back({v, positions[static_cast<size_t>(v)], role, supply[static_cast<size_t>(v)]});
  }
  for (const DirectedEdge& e : assign_flows(topo, supply)) {
    const double len = norm(space, positions[static_cast<size_t>(e.head)] - positions[static_cast<size_t>(e.tail)]);
    arb.edges.push_back({e.tail, e.head, e.flow, weight(e.flow), len});
  }
  return arb;
}

std::vector<double> supply_vector(const Instance& inst, int steiner_count) {
  std::vector<double> supply(static_cast<size_t>(inst.terminal_count() + steiner_count), 0.0);
  for (int i = 0; i < inst.source_count(); ++i) supply[static_cast<size_t>(i)] = inst.sources[static_cast<size_t>(i)].flow;
  return supply;
}

EmbeddedArborescence embed(const Instance& inst, const SteinerTopology& topo,
                           std::span<const Vector> steiner_positions) {
  if (topo.terminal_count != inst.terminal_count()) throw InvalidInput("topology does not match the instance");
  if (static_cast<int>(steiner_positions.size()) != topo.steiner_count) {
    throw InvalidInput("one position per Steiner point is required");
  }
  std::vector<Vector> positions;
  positions.reserve(static_cast<size_t>(topo.vertex_count()));
  for (int t = 0; t < topo.terminal_count; ++t) positions.push_back(inst.terminal_position(t));
  for (const Vector& s : steiner_positions) positions.push_back(s);
  const std::vector<double> supply = supply_vector(inst, topo.steiner_count);
  return embed(inst.space, inst.weight, topo, positions, supply);
}

}  // namespace gilbert
