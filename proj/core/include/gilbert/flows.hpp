#pragma once

#include <span>
#include <vector>

#include "gilbert/model.hpp"
#include "gilbert/topology.hpp"

namespace gilbert {

struct DirectedEdge {
  int tail = 0;
  int head = 0;
  double flow = 0.0;
};

// Orients every edge of the tree toward the sink and assigns it the total
// supply of the subtree behind its tail (Kirchhoff's rule). `supply` is
// indexed by vertex id: positive for sources, zero elsewhere. The result is
// aligned with topo.edges. Throws InvalidTopology for non-trees and
// InvalidInput for bad supplies.
std::vector<DirectedEdge> assign_flows(const SteinerTopology& topo, std::span<const double> supply);

// Builds an embedded arborescence from a topology, a position per vertex and
// a supply per vertex; derives flows, weights and lengths.
EmbeddedArborescence embed(const NormSpace& space, const WeightFunction& weight, const SteinerTopology& topo,
                           std::span<const Vector> positions, std::span<const double> supply);

// Same, taking terminal positions and flows from the instance.
EmbeddedArborescence embed(const Instance& inst, const SteinerTopology& topo,
                           std::span<const Vector> steiner_positions);

// Per-vertex supply vector for an instance and a given number of Steiner
// points.
std::vector<double> supply_vector(const Instance& inst, int steiner_count);

}  // namespace gilbert
