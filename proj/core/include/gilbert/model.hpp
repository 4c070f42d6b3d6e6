#pragma once

#include <vector>

#include "gilbert/error.hpp"
#include "gilbert/minkowski.hpp"

namespace gilbert {

// Linear unit cost w(t) = d + h t. d is the fixed cost per unit length and h
// the additional cost per unit flow per unit length; h = 0 reduces the
// problem to the Steiner minimum tree.
struct WeightFunction {
  double d = 1.0;
  double h = 0.0;

  double operator()(double t) const { return d + h * t; }
  bool operator==(const WeightFunction&) const = default;
};

// w(t); throws InvalidInput for t < 0.
double weight_eval(const WeightFunction& w, double t);

// Requires d > 0 and h >= 0, then checks non-negativity, monotonicity,
// subadditivity and concavity on a sampled grid of flows.
Validation validate_weight(const WeightFunction& w);

struct Source {
  Vector position;
  double flow = 0.0;
};

// n sources feeding a single sink. Topology vertex ids follow the instance:
// sources are 0..n-1, the sink is n, Steiner points come after.
struct Instance {
  NormSpace space = NormSpace::euclidean();
  WeightFunction weight;
  std::vector<Source> sources;
  Vector sink;

  int source_count() const { return static_cast<int>(sources.size()); }
  int terminal_count() const { return source_count() + 1; }
  int sink_id() const { return source_count(); }
  const Vector& terminal_position(int id) const {
    return id == sink_id() ? sink : sources[static_cast<size_t>(id)].position;
  }
  double total_flow() const;
};

// Throws InvalidInput unless the space and weight validate, n >= 1, flows are
// positive and finite, positions are finite with matching dimension, no two
// sources share coordinates, and the sink is apart from every source.
void validate_instance(const Instance& inst);

// Largest pairwise terminal distance, measured in the instance norm.
double diameter(const Instance& inst);

enum class Role { kSource, kSink, kSteiner };

struct Vertex {
  int id = 0;
  Vector position;
  Role role = Role::kSteiner;
  double supply = 0.0;  // source flow; zero for the sink and Steiner points
};

// Edges point toward the sink. flow, weight and length are derived values,
// kept consistent by the constructors in flows.hpp and by relocate().
struct Edge {
  int tail = 0;
  int head = 0;
  double flow = 0.0;
  double weight = 0.0;
  double length = 0.0;
};

// A Gilbert arborescence embedded in the space. Vertex i has id i; terminals
// come first (sources, then the sink), Steiner points last.
struct EmbeddedArborescence {
  NormSpace space = NormSpace::euclidean();
  WeightFunction weight;
  std::vector<Vertex> vertices;
  std::vector<Edge> edges;

  int vertex_count() const { return static_cast<int>(vertices.size()); }
  int sink() const;
  std::vector<int> steiner_ids() const;
  int degree(int v) const;
  // Indices into `edges` of edges incident to v.
  std::vector<int> incident_edges(int v) const;
};

// Checks every structural and derived-value invariant; throws InvalidInput.
void validate_arborescence(const EmbeddedArborescence& arb, double rel_tol = 1e-9);

// C(T) = sum over edges of w(t_e) * l_e.
double total_cost(const EmbeddedArborescence& arb);

// Moves a vertex and refreshes the lengths of its incident edges.
void relocate(EmbeddedArborescence& arb, int v, const Vector& position);

}  // namespace gilbert
