#pragma once

#include <string>
#include <utility>
#include <vector>

#include "gilbert/model.hpp"

namespace gilbert {

inline constexpr int kDefaultMaxTerminals = 9;

// Abstract tree over vertex ids: terminals 0..terminal_count-1 (sources
// first, the sink last) followed by steiner_count Steiner points. Enumerated
// topologies are full; collapsed embeddings may produce non-full trees, which
// use the same representation.
struct SteinerTopology {
  int terminal_count = 0;
  int steiner_count = 0;
  std::vector<std::pair<int, int>> edges;

  int vertex_count() const { return terminal_count + steiner_count; }
  int sink() const { return terminal_count - 1; }
  bool is_steiner(int v) const { return v >= terminal_count; }
};

// Connected with |E| = |V| - 1 and edge endpoints in range.
bool is_tree(const SteinerTopology& topo);

// Tree in which terminals are leaves and Steiner points have degree exactly 3
// (for terminal_count >= 3; for 2 terminals the single edge).
bool is_full(const SteinerTopology& topo);

// All full Steiner topologies on k terminals, (2k-5)!! of them for k >= 3,
// built by inserting terminal j onto every edge of each topology for j-1.
// Throws SizeLimitExceeded when k > max_terminals, InvalidInput when k < 2.
std::vector<SteinerTopology> enumerate_full(int k, int max_terminals = kDefaultMaxTerminals);

using CanonicalKey = std::string;

// Equal keys iff the trees are isomorphic by a map that fixes every terminal
// and permutes Steiner ids. The key is the tree's AHU encoding rooted at
// terminal 0 with children sorted lexicographically.
CanonicalKey canonicalize(const SteinerTopology& topo);

// Abstract tree underlying an embedding.
SteinerTopology topology_of(const EmbeddedArborescence& arb);

// Contracts every edge shorter than eps_merge. A merged vertex keeps the
// terminal endpoint if there is one, otherwise sits at the midpoint. Steiner
// ids are compacted afterwards; terminal ids are unchanged. Flows, weights
// and lengths are re-derived. Throws DegenerateInstance if two terminals
// would merge.
EmbeddedArborescence collapse_degenerate(const EmbeddedArborescence& arb, double eps_merge);

}  // namespace gilbert
