#include "gilbert/certify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "gilbert/flows.hpp"
#include "gilbert/optimizer.hpp"
#include "gilbert/topology.hpp"

namespace gilbert {

LocalStar local_star(const EmbeddedArborescence& arb, int steiner_id) {
  if (steiner_id < 0 || steiner_id >= arb.vertex_count()) throw InvalidInput("vertex out of range");
  const Vertex& center = arb.vertices[static_cast<size_t>(steiner_id)];
  if (center.role != Role::kSteiner) throw InvalidInput("vertex " + std::to_string(steiner_id) + " is not a Steiner point");

  LocalStar star;
  star.center_id = steiner_id;
  star.center = center.position;
  bool has_outgoing = false;
  for (const Edge& e : arb.edges) {
    if (e.head == steiner_id) {
      star.incoming.push_back({e.tail, arb.vertices[static_cast<size_t>(e.tail)].position - center.position, e.flow});
    } else if (e.tail == steiner_id) {
      if (has_outgoing) throw InvalidInput("Steiner point with two edges toward the sink");
      star.outgoing = {e.head, arb.vertices[static_cast<size_t>(e.head)].position - center.position, e.flow};
      has_outgoing = true;
    }
  }
  if (!has_outgoing) throw InvalidInput("Steiner point without an edge toward the sink");
  if (star.incoming.size() + 1 < 3) throw InvalidInput("Steiner point of degree below 3");
  return star;
}

double check_balancing(const LocalStar& star, const WeightFunction& w, const NormSpace& space) {
  Vector sum = Vector::Zero(space.dim());
  double total = 0.0;
  for (const StarArm& arm : star.incoming) {
    sum += w(arm.flow) * dual_vector(space, arm.direction);
    total += arm.flow;
  }
  sum += w(total) * dual_vector(space, star.outgoing.direction);
  return dual_norm(space, sum);
}

std::vector<SubsetSlack> check_collapsing(const LocalStar& star, const WeightFunction& w, const NormSpace& space,
                                          int max_incoming) {
  const int n = static_cast<int>(star.incoming.size());
  if (n > max_incoming || n >= 31) {
    throw SizeLimitExceeded(std::to_string(n) + " incoming edges exceed the subset enumeration cap");
  }
  std::vector<Vector> weighted;
  for (const StarArm& arm : star.incoming) weighted.push_back(w(arm.flow) * dual_vector(space, arm.direction));

  std::vector<SubsetSlack> out;
  out.reserve((size_t{1} << n) - 1);
  for (unsigned mask = 1; mask < (1u << n); ++mask) {
    SubsetSlack s;
    Vector sum = Vector::Zero(space.dim());
    double flow = 0.0;
    for (int i = 0; i < n; ++i) {
      if (mask & (1u << i)) {
        s.subset.push_back(i);
        sum += weighted[static_cast<size_t>(i)];
        flow += star.incoming[static_cast<size_t>(i)].flow;
      }
    }
    s.slack = w(flow) - dual_norm(space, sum);
    out.push_back(std::move(s));
  }
  return out;
}

double SteinerCertificate::min_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const SubsetSlack& s : collapsing_slacks) m = std::min(m, s.slack);
  return m;
}

double Certificate::max_balancing_residual() const {
  double m = 0.0;
  for (const SteinerCertificate& p : points) m = std::max(m, p.balancing_residual);
  return m;
}

double Certificate::min_collapsing_slack() const {
  double m = std::numeric_limits<double>::infinity();
  for (const SteinerCertificate& p : points) m = std::min(m, p.min_slack());
  return m;
}

int Certificate::max_steiner_degree() const {
  int m = 0;
  for (const SteinerCertificate& p : points) m = std::max(m, p.degree);
  return m;
}

Certificate certify(const EmbeddedArborescence& arb, const Instance& inst, const Tolerances& tol) {
  if (!(arb.space == inst.space) || !(arb.weight == inst.weight)) {
    throw InvalidInput("arborescence and instance use different norms or weights");
  }
  validate_arborescence(arb);
  Certificate cert;
  cert.tolerances = tol;
  for (int id : arb.steiner_ids()) {
    const LocalStar star = local_star(arb, id);
    SteinerCertificate point;
    point.vertex = id;
    point.degree = static_cast<int>(star.incoming.size()) + 1;
    for (const StarArm& arm : star.incoming) point.incoming_neighbors.push_back(arm.neighbor);
    point.outgoing_neighbor = star.outgoing.neighbor;
    point.balancing_residual = check_balancing(star, inst.weight, inst.space);
    point.collapsing_slacks = check_collapsing(star, inst.weight, inst.space);
    if (!(point.balancing_residual <= tol.balancing) || !(point.min_slack() >= -tol.collapsing)) cert.pass = false;
    cert.points.push_back(std::move(point));
  }
  return cert;
}

namespace {

// Rebuilds the embedding with incoming arms `subset` of `center` re-attached
// to a new Steiner point at `where`, which in turn feeds `center`.
EmbeddedArborescence reroute(const EmbeddedArborescence& arb, int center, const std::vector<int>& moved_tails,
                             const Vector& where) {
  SteinerTopology topo = topology_of(arb);
  const int fresh = topo.vertex_count();
  for (auto& [tail, head] : topo.edges) {
    if (head == center && std::find(moved_tails.begin(), moved_tails.end(), tail) != moved_tails.end()) head = fresh;
  }
  topo.edges.emplace_back(fresh, center);
  topo.steiner_count += 1;
  std::vector<Vector> positions;
  std::vector<double> supply;
  for (const Vertex& v : arb.vertices) {
    positions.push_back(v.position);
    supply.push_back(v.supply);
  }
  positions.push_back(where);
  supply.push_back(0.0);
  return embed(arb.space, arb.weight, topo, positions, supply);
}

// Removes Steiner points with a single incoming and a single outgoing edge by
// joining their neighbours directly; the flow is unchanged and by the
// triangle inequality so is or drops the cost.
EmbeddedArborescence splice_pass_through(const EmbeddedArborescence& arb) {
  SteinerTopology topo = topology_of(arb);
  std::vector<char> alive(static_cast<size_t>(topo.vertex_count()), 1);
  for (int v = topo.terminal_count; v < topo.vertex_count(); ++v) {
    std::vector<size_t> incident;
    for (size_t i = 0; i < topo.edges.size(); ++i) {
      if (topo.edges[i].first == v || topo.edges[i].second == v) incident.push_back(i);
    }
    if (incident.size() != 2) continue;
    auto& e0 = topo.edges[incident[0]];
    const auto e1 = topo.edges[incident[1]];
    const int a = e0.first == v ? e0.second : e0.first;
    const int b = e1.first == v ? e1.second : e1.first;
    e0 = {a, b};
    topo.edges.erase(topo.edges.begin() + static_cast<std::ptrdiff_t>(incident[1]));
    alive[static_cast<size_t>(v)] = 0;
  }
  std::vector<int> new_id(alive.size(), -1);
  int next = 0;
  std::vector<Vector> positions;
  std::vector<double> supply;
  for (size_t v = 0; v < alive.size(); ++v) {
    if (!alive[v]) continue;
    new_id[v] = next++;
    positions.push_back(arb.vertices[v].position);
    supply.push_back(arb.vertices[v].supply);
  }
  for (auto& [a, b] : topo.edges) {
    a = new_id[static_cast<size_t>(a)];
    b = new_id[static_cast<size_t>(b)];
  }
  topo.steiner_count = next - topo.terminal_count;
  return embed(arb.space, arb.weight, topo, positions, supply);
}

}  // namespace

SplitResult split_improve(const EmbeddedArborescence& arb, int steiner_id, std::span<const int> subset,
                          const Instance& inst) {
  return split_improve(arb, steiner_id, subset, inst, OptimizerConfig{});
}

SplitResult split_improve(const EmbeddedArborescence& arb, int steiner_id, std::span<const int> subset,
                          const Instance& inst, const OptimizerConfig& cfg) {
  const LocalStar star = local_star(arb, steiner_id);
  std::vector<int> chosen(subset.begin(), subset.end());
  std::sort(chosen.begin(), chosen.end());
  if (chosen.empty() || std::adjacent_find(chosen.begin(), chosen.end()) != chosen.end() || chosen.front() < 0 ||
      chosen.back() >= static_cast<int>(star.incoming.size())) {
    throw InvalidInput("subset must list distinct incoming arm indices");
  }

  Vector pull = Vector::Zero(arb.space.dim());
  double flow = 0.0;
  std::vector<int> moved_tails;
  for (int i : chosen) {
    const StarArm& arm = star.incoming[static_cast<size_t>(i)];
    pull += arb.weight(arm.flow) * dual_vector(arb.space, arm.direction);
    flow += arm.flow;
    moved_tails.push_back(arm.neighbor);
  }
  const double slack = arb.weight(flow) - dual_norm(arb.space, pull);
  if (!(slack < 0.0)) {
    throw PreconditionViolated("collapsing condition holds for this subset (slack " + std::to_string(slack) +
                               "); splitting cannot lower the cost");
  }

  const Vector direction = norming_vector(arb.space, pull);
  double shortest = std::numeric_limits<double>::infinity();
  for (int e : arb.incident_edges(steiner_id)) shortest = std::min(shortest, arb.edges[static_cast<size_t>(e)].length);

  const double original = total_cost(arb);
  SplitResult result;
  bool improved = false;
  for (double step = 0.1 * shortest; step > 0.0 && !improved; step *= 0.5) {
    const Vector where = star.center + step * direction;
    EmbeddedArborescence split = reroute(arb, steiner_id, moved_tails, where);
    const double delta = total_cost(split) - original;
    if (delta < 0.0) {
      result.arborescence = std::move(split);
      result.split_delta = delta;
      result.split_point = where;
      result.new_vertex = arb.vertex_count();
      improved = true;
    }
  }
  if (!improved) throw Error("no improving split step found despite a negative collapsing slack");

  const EmbeddedArborescence spliced = splice_pass_through(result.arborescence);
  const FixedTopologyResult reopt = optimize_embedding(spliced, diameter(inst), cfg);
  if (reopt.cost < original + result.split_delta) {
    result.arborescence = reopt.arborescence;
    result.cost_delta = reopt.cost - original;
  } else {
    result.cost_delta = result.split_delta;
  }
  return result;
}

}  // namespace gilbert
