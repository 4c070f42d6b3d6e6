#include "gilbert/model.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <string>

namespace gilbert {

double weight_eval(const WeightFunction& w, double t) {
  if (!(t >= 0.0)) throw InvalidInput("flow must be non-negative, got " + std::to_string(t));
  return w(t);
}

Validation validate_weight(const WeightFunction& w) {
  if (!std::isfinite(w.d) || !std::isfinite(w.h)) return Rejection{"weight coefficients must be finite"};
  if (w.h < 0.0) return Rejection{"non-decreasing violated: h must be >= 0"};
  if (w.d <= 0.0) return Rejection{"d>0 required; triangular condition degenerates"};

  constexpr std::array<double, 9> kFlows = {0.0, 1e-3, 0.1, 0.5, 1.0, 2.0, 7.5, 100.0, 1e4};
  for (double a : kFlows) {
    const double wa = w(a);
    if (wa < 0.0 || (a > 0.0 && wa <= 0.0)) return Rejection{"non-negativity violated"};
    for (double b : kFlows) {
      const double wb = w(b);
      const double slack = 1e-12 * (1.0 + std::abs(wa) + std::abs(wb));
      if (b > 0.0 && w(a + b) < wa - slack) return Rejection{"non-decreasing violated"};
      if (a > 0.0 && b > 0.0 && w(a + b) > wa + wb + slack) {
        return Rejection{"triangular (subadditivity) condition violated"};
      }
      if (w(0.5 * (a + b)) < 0.5 * (wa + wb) - slack) return Rejection{"concavity violated"};
    }
  }
  return std::nullopt;
}

double Instance::total_flow() const {
  return std::accumulate(sources.begin(), sources.end(), 0.0,
                         [](double acc, const Source& s) { return acc + s.flow; });
}

namespace {

bool finite_vector(const Vector& v) { return v.allFinite(); }

}  // namespace

void validate_instance(const Instance& inst) {
  if (auto r = validate_space(inst.space)) throw InvalidInput("invalid norm: " + r->reason);
  if (auto r = validate_weight(inst.weight)) throw InvalidInput("invalid weight: " + r->reason);
  if (inst.sources.empty()) throw InvalidInput("at least one source is required");
  const int dim = inst.space.dim();
  if (inst.sink.size() != dim) throw InvalidInput("sink dimension mismatch");
  if (!finite_vector(inst.sink)) throw InvalidInput("sink position is not finite");
  for (size_t i = 0; i < inst.sources.size(); ++i) {
    const Source& s = inst.sources[i];
    const std::string where = "source " + std::to_string(i);
    if (s.position.size() != dim) throw InvalidInput(where + ": dimension mismatch");
    if (!finite_vector(s.position)) throw InvalidInput(where + ": position is not finite");
    if (!(s.flow > 0.0) || !std::isfinite(s.flow)) throw InvalidInput(where + ": flow must be positive and finite");
    const Vector to_sink = s.position - inst.sink;
    if (norm(inst.space, to_sink) <= zero_tolerance(to_sink)) {
      throw InvalidInput(where + ": coincides with the sink");
    }
    for (size_t j = 0; j < i; ++j) {
      if (inst.sources[j].position == s.position) {
        throw InvalidInput(where + ": duplicates source " + std::to_string(j) + "; merge flows first");
      }
    }
  }
}

double diameter(const Instance& inst) {
  double best = 0.0;
  const int k = inst.terminal_count();
  for (int a = 0; a < k; ++a) {
    for (int b = a + 1; b < k; ++b) {
      best = std::max(best, norm(inst.space, inst.terminal_position(a) - inst.terminal_position(b)));
    }
  }
  return best;
}

int EmbeddedArborescence::sink() const {
  for (const Vertex& v : vertices) {
    if (v.role == Role::kSink) return v.id;
  }
  throw InvalidInput("arborescence has no sink");
}

std::vector<int> EmbeddedArborescence::steiner_ids() const {
  std::vector<int> ids;
  for (const Vertex& v : vertices) {
    if (v.role == Role::kSteiner) ids.push_back(v.id);
  }
  return ids;
}

int EmbeddedArborescence::degree(int v) const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(),
                                        [v](const Edge& e) { return e.tail == v || e.head == v; }));
}

std::vector<int> EmbeddedArborescence::incident_edges(int v) const {
  std::vector<int> out;
  for (size_t i = 0; i < edges.size(); ++i) {
    if (edges[i].tail == v || edges[i].head == v) out.push_back(static_cast<int>(i));
  }
  return out;
}

void validate_arborescence(const EmbeddedArborescence& arb, double rel_tol) {
  const int n = arb.vertex_count();
  if (n == 0) throw InvalidInput("empty arborescence");
  if (static_cast<int>(arb.edges.size()) != n - 1) {
    throw InvalidInput("not a tree: " + std::to_string(arb.edges.size()) + " edges for " +
                       std::to_string(n) + " vertices");
  }
  int sinks = 0;
  for (int i = 0; i < n; ++i) {
    const Vertex& v = arb.vertices[static_cast<size_t>(i)];
    if (v.id != i) throw InvalidInput("vertex ids must equal their index");
    if (v.position.size() != arb.space.dim()) throw InvalidInput("vertex dimension mismatch");
    if (v.role == Role::kSink) ++sinks;
    if (v.role == Role::kSource && !(v.supply > 0.0)) throw InvalidInput("source without positive supply");
    if (v.role != Role::kSource && v.supply != 0.0) throw InvalidInput("only sources carry supply");
  }
  if (sinks != 1) throw InvalidInput("arborescence must have exactly one sink");
  const int sink = arb.sink();

  // Every non-sink vertex has exactly one outgoing edge; following them must
  // reach the sink without revisiting a vertex.
  std::vector<int> next(static_cast<size_t>(n), -1);
  std::vector<double> inflow(static_cast<size_t>(n), 0.0);
  for (const Edge& e : arb.edges) {
    if (e.tail < 0 || e.tail >= n || e.head < 0 || e.head >= n || e.tail == e.head) {
      throw InvalidInput("edge endpoint out of range");
    }
    if (e.tail == sink) throw InvalidInput("edge leaves the sink");
    if (next[static_cast<size_t>(e.tail)] != -1) throw InvalidInput("vertex with two outgoing edges");
    next[static_cast<size_t>(e.tail)] = e.head;
    inflow[static_cast<size_t>(e.head)] += e.flow;
  }
  for (int v = 0; v < n; ++v) {
    int cur = v;
    for (int steps = 0; cur != sink; ++steps) {
      if (steps > n || cur < 0) throw InvalidInput("vertex without a directed path to the sink");
      cur = next[static_cast<size_t>(cur)];
    }
  }
  for (const Edge& e : arb.edges) {
    const Vertex& tail = arb.vertices[static_cast<size_t>(e.tail)];
    const double expected_flow = inflow[static_cast<size_t>(e.tail)] + tail.supply;
    const double scale = 1.0 + std::abs(expected_flow);
    if (std::abs(e.flow - expected_flow) > rel_tol * scale) throw InvalidInput("edge flow violates Kirchhoff's rule");
    if (std::abs(e.weight - arb.weight(e.flow)) > rel_tol * (1.0 + std::abs(e.weight))) {
      throw InvalidInput("edge weight inconsistent with its flow");
    }
    const double len = norm(arb.space, arb.vertices[static_cast<size_t>(e.head)].position - tail.position);
    if (std::abs(e.length - len) > rel_tol * (1.0 + len)) throw InvalidInput("edge length inconsistent with positions");
  }
}

double total_cost(const EmbeddedArborescence& arb) {
  validate_arborescence(arb);
  double cost = 0.0;
  for (const Edge& e : arb.edges) cost += e.weight * e.length;
  return cost;
}

void relocate(EmbeddedArborescence& arb, int v, const Vector& position) {
  if (v < 0 || v >= arb.vertex_count()) throw InvalidInput("vertex out of range");
  arb.vertices[static_cast<size_t>(v)].position = position;
  for (Edge& e : arb.edges) {
    if (e.tail == v || e.head == v) {
      e.length = norm(arb.space, arb.vertices[static_cast<size_t>(e.head)].position -
                                     arb.vertices[static_cast<size_t>(e.tail)].position);
    }
  }
}

}  // namespace gilbert
