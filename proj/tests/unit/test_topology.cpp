#include <algorithm>
#include <numeric>
#include <random>
#include <set>

#include <gtest/gtest.h>

#include <gilbert/flows.hpp>
#include <gilbert/topology.hpp>

#include "suite.hpp"

using namespace gilbert;
using gilbert::testing::v2;

namespace {

std::set<std::pair<int, int>> edge_set(const SteinerTopology& t) {
  std::set<std::pair<int, int>> s;
  for (auto [a, b] : t.edges) s.insert({std::min(a, b), std::max(a, b)});
  return s;
}

// Tries every permutation of Steiner ids.
bool isomorphic_fixing_terminals(const SteinerTopology& a, const SteinerTopology& b) {
  if (a.terminal_count != b.terminal_count || a.steiner_count != b.steiner_count) return false;
  const auto target = edge_set(b);
  std::vector<int> perm(static_cast<size_t>(a.steiner_count));
  std::iota(perm.begin(), perm.end(), a.terminal_count);
  do {
    SteinerTopology mapped = a;
    for (auto& [u, v] : mapped.edges) {
      if (a.is_steiner(u)) u = perm[static_cast<size_t>(u - a.terminal_count)];
      if (a.is_steiner(v)) v = perm[static_cast<size_t>(v - a.terminal_count)];
    }
    if (edge_set(mapped) == target) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

SteinerTopology relabel_steiner(const SteinerTopology& t, std::mt19937_64& rng) {
  std::vector<int> perm(static_cast<size_t>(t.steiner_count));
  std::iota(perm.begin(), perm.end(), t.terminal_count);
  std::shuffle(perm.begin(), perm.end(), rng);
  SteinerTopology out = t;
  for (auto& [u, v] : out.edges) {
    if (t.is_steiner(u)) u = perm[static_cast<size_t>(u - t.terminal_count)];
    if (t.is_steiner(v)) v = perm[static_cast<size_t>(v - t.terminal_count)];
    if (rng() & 1) std::swap(u, v);
  }
  std::shuffle(out.edges.begin(), out.edges.end(), rng);
  return out;
}

Instance square_instance() {
  Instance inst;
  inst.weight = {1, 0.5};
  inst.sources = {{v2(0, 0), 1.0}, {v2(1, 0), 2.0}, {v2(1, 1), 1.0}};
  inst.sink = v2(0, 1);
  return inst;
}

}  // namespace

TEST(EnumerateFull, CountsAreDoubleFactorials) {
  const size_t expected[] = {1, 1, 3, 15, 105, 945, 10395};
  for (int k = 2; k <= 8; ++k) EXPECT_EQ(enumerate_full(k).size(), expected[k - 2]) << "k=" << k;
}

TEST(EnumerateFull, TwoTerminalsIsTheDirectEdge) {
  const auto t = enumerate_full(2);
  ASSERT_EQ(t.size(), 1u);
  EXPECT_EQ(t[0].steiner_count, 0);
  ASSERT_EQ(t[0].edges.size(), 1u);
}

TEST(EnumerateFull, AllFullAndPairwiseDistinctUpToSeven) {
  for (int k = 3; k <= 7; ++k) {
    std::set<CanonicalKey> keys;
    for (const SteinerTopology& t : enumerate_full(k)) {
      ASSERT_TRUE(is_full(t));
      keys.insert(canonicalize(t));
    }
    EXPECT_EQ(keys.size(), enumerate_full(k).size()) << "k=" << k;
  }
}

TEST(EnumerateFull, Limits) {
  EXPECT_THROW(enumerate_full(1), InvalidInput);
  EXPECT_THROW(enumerate_full(10), SizeLimitExceeded);
  EXPECT_THROW(enumerate_full(6, 5), SizeLimitExceeded);
  EXPECT_NO_THROW(enumerate_full(9));
}

TEST(Canonicalize, InvariantUnderSteinerRelabelling) {
  std::mt19937_64 rng(9);
  for (int k : {4, 5, 6}) {
    for (const SteinerTopology& t : enumerate_full(k)) {
      const CanonicalKey key = canonicalize(t);
      for (int r = 0; r < 5; ++r) EXPECT_EQ(canonicalize(relabel_steiner(t, rng)), key);
    }
  }
}

TEST(Canonicalize, KeysAgreeWithBruteForceIsomorphism) {
  for (int k : {4, 5}) {
    const auto all = enumerate_full(k);
    for (size_t i = 0; i < all.size(); ++i) {
      for (size_t j = 0; j < all.size(); ++j) {
        EXPECT_EQ(canonicalize(all[i]) == canonicalize(all[j]), isomorphic_fixing_terminals(all[i], all[j]))
            << "k=" << k << " pair " << i << "," << j;
      }
    }
  }
}

TEST(Canonicalize, StableForThreeTerminals) {
  EXPECT_EQ(canonicalize(enumerate_full(3).front()), "3:t0(s(t1,t2))");
  EXPECT_THROW(canonicalize(SteinerTopology{3, 1, {{0, 3}, {1, 3}}}), InvalidTopology);
}

TEST(CollapseDegenerate, SteinerOnSourceMerges) {
  Instance inst;
  inst.sources = {{v2(0, 0), 1.0}, {v2(1, 0), 1.0}};
  inst.sink = v2(0.5, 1);
  const EmbeddedArborescence a = embed(inst, enumerate_full(3).front(), std::vector<Vector>{v2(1e-12, 0)});
  const EmbeddedArborescence c = collapse_degenerate(a, 1e-9);
  EXPECT_TRUE(c.steiner_ids().empty());
  EXPECT_EQ(c.degree(0), 2);  // in from source 1, out to the sink
  EXPECT_NO_THROW(validate_arborescence(c));
  EXPECT_LT(std::abs(total_cost(c) - total_cost(a)), 1 * 1e-9 * 1.0);
}

TEST(CollapseDegenerate, NothingBelowThresholdIsIdentity) {
  const Instance inst = square_instance();
  const SteinerTopology t = enumerate_full(4).front();
  const EmbeddedArborescence a = embed(inst, t, std::vector<Vector>{v2(0.3, 0.4), v2(0.7, 0.6)});
  const EmbeddedArborescence c = collapse_degenerate(a, 1e-9);
  ASSERT_EQ(c.vertex_count(), a.vertex_count());
  ASSERT_EQ(c.edges.size(), a.edges.size());
  for (int v = 0; v < a.vertex_count(); ++v) {
    EXPECT_EQ(c.vertices[static_cast<size_t>(v)].position, a.vertices[static_cast<size_t>(v)].position);
  }
  for (size_t i = 0; i < a.edges.size(); ++i) {
    EXPECT_EQ(c.edges[i].tail, a.edges[i].tail);
    EXPECT_EQ(c.edges[i].head, a.edges[i].head);
    EXPECT_EQ(c.edges[i].flow, a.edges[i].flow);
  }
}

TEST(CollapseDegenerate, ChainOfTwoShortEdges) {
  const Instance inst = square_instance();
  // Topology with Steiner 4 adjacent to source 0 and Steiner 5.
  SteinerTopology t{4, 2, {{0, 4}, {1, 4}, {4, 5}, {2, 5}, {5, 3}}};
  const std::vector<Vector> s{v2(1e-13, 0), v2(2e-13, 0)};
  const EmbeddedArborescence a = embed(inst, t, s);
  const EmbeddedArborescence c = collapse_degenerate(a, 1e-9);
  EXPECT_TRUE(c.steiner_ids().empty());
  EXPECT_EQ(c.edges.size(), 3u);
  EXPECT_TRUE(is_tree(topology_of(c)));
  EXPECT_EQ(c.degree(0), 3);
  double max_weight = 0.0;
  for (const Edge& e : a.edges) max_weight = std::max(max_weight, e.weight);
  EXPECT_LT(std::abs(total_cost(c) - total_cost(a)), 2 * 1e-9 * max_weight);
}

TEST(CollapseDegenerate, TwoSteinerPointsMergeAtMidpoint) {
  const Instance inst = square_instance();
  SteinerTopology t{4, 2, {{0, 4}, {1, 4}, {4, 5}, {2, 5}, {5, 3}}};
  const EmbeddedArborescence a = embed(inst, t, std::vector<Vector>{v2(0.5, 0.5), v2(0.5, 0.5 + 1e-12)});
  const EmbeddedArborescence c = collapse_degenerate(a, 1e-9);
  ASSERT_EQ(c.steiner_ids().size(), 1u);
  EXPECT_EQ(c.degree(4), 4);
  EXPECT_NEAR(c.vertices[4].position[1], 0.5 + 0.5e-12, 1e-15);
}

TEST(CollapseDegenerate, MergingTerminalsIsRejected) {
  Instance inst;
  inst.sources = {{v2(0, 0), 1.0}, {v2(1e-7, 0), 1.0}};
  inst.sink = v2(0.5, 1);
  const EmbeddedArborescence a = embed(inst, enumerate_full(3).front(), std::vector<Vector>{v2(0.5e-7, 0)});
  EXPECT_THROW(collapse_degenerate(a, 1e-6), DegenerateInstance);
  EXPECT_THROW(collapse_degenerate(a, 0.0), InvalidInput);
}

TEST(TopologyOf, RoundTripsEnumeratedTopologies) {
  const Instance inst = square_instance();
  for (const SteinerTopology& t : enumerate_full(4)) {
    const EmbeddedArborescence a = embed(inst, t, std::vector<Vector>{v2(0.3, 0.4), v2(0.7, 0.6)});
    EXPECT_EQ(canonicalize(topology_of(a)), canonicalize(t));
  }
}
