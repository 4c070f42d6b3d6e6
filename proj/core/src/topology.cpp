#include "gilbert/topology.hpp"

#include <algorithm>
#include <functional>
#include <numeric>

#include "gilbert/flows.hpp"

namespace gilbert {

namespace {

std::vector<std::vector<int>> adjacency(const SteinerTopology& topo) {
  std::vector<std::vector<int>> adj(static_cast<size_t>(topo.vertex_count()));
  for (const auto& [a, b] : topo.edges) {
    adj[static_cast<size_t>(a)].push_back(b);
    adj[static_cast<size_t>(b)].push_back(a);
  }
  return adj;
}

}  // namespace

bool is_tree(const SteinerTopology& topo) {
  const int n = topo.vertex_count();
  if (topo.terminal_count < 1 || topo.steiner_count < 0) return false;
  if (static_cast<int>(topo.edges.size()) != n - 1) return false;
  for (const auto& [a, b] : topo.edges) {
    if (a < 0 || b < 0 || a >= n || b >= n || a == b) return false;
  }
  const auto adj = adjacency(topo);
  std::vector<char> seen(static_cast<size_t>(n), 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int v = stack.back();
    stack.pop_back();
    for (int u : adj[static_cast<size_t>(v)]) {
      if (!seen[static_cast<size_t>(u)]) {
        seen[static_cast<size_t>(u)] = 1;
        ++visited;
        stack.push_back(u);
      }
    }
  }
  return visited == n;
}

bool is_full(const SteinerTopology& topo) {
  if (!is_tree(topo)) return false;
  if (topo.terminal_count == 2) return topo.steiner_count == 0;
  if (topo.steiner_count != topo.terminal_count - 2) return false;
  const auto adj = adjacency(topo);
  for (int v = 0; v < topo.vertex_count(); ++v) {
    const size_t deg = adj[static_cast<size_t>(v)].size();
    if (topo.is_steiner(v) ? deg != 3 : deg != 1) return false;
  }
  return true;
}

std::vector<SteinerTopology> enumerate_full(int k, int max_terminals) {
  if (k < 2) throw InvalidInput("at least two terminals are required");
  if (k > max_terminals) {
    throw SizeLimitExceeded(std::to_string(k) + " terminals exceed the enumeration cap of " +
                            std::to_string(max_terminals));
  }
  if (k == 2) return {SteinerTopology{2, 0, {{0, 1}}}};

  std::vector<SteinerTopology> current{SteinerTopology{k, 1, {{0, k}, {1, k}, {2, k}}}};
  for (int j = 3; j < k; ++j) {
    std::vector<SteinerTopology> next;
    next.reserve(current.size() * static_cast<size_t>(2 * j - 3));
    const int s = k + (j - 2);
    for (const SteinerTopology& t : current) {
      for (size_t e = 0; e < t.edges.size(); ++e) {
        SteinerTopology grown = t;
        const auto [a, b] = t.edges[e];
        grown.steiner_count += 1;
        grown.edges[e] = {a, s};
        grown.edges.emplace_back(s, b);
        grown.edges.emplace_back(j, s);
        next.push_back(std::move(grown));
      }
    }
    current = std::move(next);
  }
  return current;
}

CanonicalKey canonicalize(const SteinerTopology& topo) {
  if (!is_tree(topo)) throw InvalidTopology("canonicalize requires a tree");
  const auto adj = adjacency(topo);
  std::function<std::string(int, int)> encode = [&](int v, int parent) {
    std::vector<std::string> children;
    for (int u : adj[static_cast<size_t>(v)]) {
      if (u != parent) children.push_back(encode(u, v));
    }
    std::sort(children.begin(), children.end());
    std::string out = topo.is_steiner(v) ? std::string("s") : "t" + std::to_string(v);
    if (!children.empty()) {
      out += '(';
      for (size_t i = 0; i < children.size(); ++i) {
        if (i) out += ',';
        out += children[i];
      }
      out += ')';
    }
    return out;
  };
  return std::to_string(topo.terminal_count) + ":" + encode(0, -1);
}

SteinerTopology topology_of(const EmbeddedArborescence& arb) {
  SteinerTopology topo;
  for (const Vertex& v : arb.vertices) {
    if (v.role == Role::kSteiner) {
      ++topo.steiner_count;
    } else {
      if (topo.steiner_count > 0) throw InvalidInput("terminals must precede Steiner points");
      ++topo.terminal_count;
    }
  }
  for (const Edge& e : arb.edges) topo.edges.emplace_back(e.tail, e.head);
  return topo;
}

EmbeddedArborescence collapse_degenerate(const EmbeddedArborescence& arb, double eps_merge) {
  if (!(eps_merge > 0.0)) throw InvalidInput("merge threshold must be positive");
  validate_arborescence(arb);

  const SteinerTopology topo = topology_of(arb);
  std::vector<Vector> pos;
  std::vector<double> supply;
  for (const Vertex& v : arb.vertices) {
    pos.push_back(v.position);
    supply.push_back(v.supply);
  }
  std::vector<char> alive(pos.size(), 1);
  std::vector<std::pair<int, int>> edges = topo.edges;

  for (;;) {
    auto shortest = edges.end();
    double shortest_len = eps_merge;
    for (auto it = edges.begin(); it != edges.end(); ++it) {
      const double len = norm(arb.space, pos[static_cast<size_t>(it->first)] - pos[static_cast<size_t>(it->second)]);
      if (len < shortest_len) {
        shortest_len = len;
        shortest = it;
      }
    }
    if (shortest == edges.end()) break;

    auto [a, b] = *shortest;
    if (!topo.is_steiner(a) && !topo.is_steiner(b)) {
      throw DegenerateInstance("terminals " + std::to_string(a) + " and " + std::to_string(b) +
                               " are closer than the merge threshold");
    }
    if (topo.is_steiner(a) && (!topo.is_steiner(b) || b < a)) std::swap(a, b);
    // a survives: it is the terminal, or the lower Steiner id.
    if (topo.is_steiner(a)) pos[static_cast<size_t>(a)] = 0.5 * (pos[static_cast<size_t>(a)] + pos[static_cast<size_t>(b)]);
    edges.erase(shortest);
    for (auto& [u, v] : edges) {
      if (u == b) u = a;
      if (v == b) v = a;
    }
    alive[static_cast<size_t>(b)] = 0;
  }

  std::vector<int> new_id(pos.size(), -1);
  int next = 0;
  for (size_t v = 0; v < pos.size(); ++v) {
    if (alive[v]) new_id[v] = next++;
  }
  SteinerTopology merged{topo.terminal_count, next - topo.terminal_count, {}};
  for (const auto& [u, v] : edges) merged.edges.emplace_back(new_id[static_cast<size_t>(u)], new_id[static_cast<size_t>(v)]);
  std::vector<Vector> merged_pos;
  std::vector<double> merged_supply;
  for (size_t v = 0; v < pos.size(); ++v) {
    if (alive[v]) {
      merged_pos.push_back(pos[v]);
      merged_supply.push_back(supply[v]);
    }
  }
  return embed(arb.space, arb.weight, merged, merged_pos, merged_supply);
}

}  // namespace gilbert
