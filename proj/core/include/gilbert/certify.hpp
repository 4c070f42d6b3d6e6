#pragma once

#include <span>
#include <vector>

#include "gilbert/model.hpp"

namespace gilbert {

struct OptimizerConfig;

struct Tolerances {
  double balancing = 1e-8;   // dual-norm units
  double collapsing = 1e-8;  // cost per unit length
};

struct StarArm {
  int neighbor = -1;
  Vector direction;  // neighbor position minus the centre
  double flow = 0.0;
};

// A Steiner point together with its neighbours, i.e. the single-star
// configuration of the optimality conditions: `incoming` arms deliver flow,
// `outgoing` leads toward the sink and carries the sum of incoming flows.
struct LocalStar {
  int center_id = -1;
  Vector center;
  std::vector<StarArm> incoming;
  StarArm outgoing;
};

// Throws InvalidInput if the vertex is not a Steiner point of degree >= 3 or
// has no edge toward the sink.
LocalStar local_star(const EmbeddedArborescence& arb, int steiner_id);

// Flow balancing residual:
//   || sum_i w(t_i) p_i* + w(sum_i t_i) q* ||*
// where p_i, q are the arm directions. Zero exactly when the star centre is
// the weighted Fermat-Torricelli point of its neighbours.
double check_balancing(const LocalStar& star, const WeightFunction& w, const NormSpace& space);

// Collapsing slack of one subset I of incoming arms:
//   w(sum_{i in I} t_i) - || sum_{i in I} w(t_i) p_i* ||*
// A negative slack means splitting I off the centre lowers the cost.
struct SubsetSlack {
  std::vector<int> subset;  // indices into LocalStar::incoming
  double slack = 0.0;
};

// Slacks for all 2^n - 1 non-empty subsets of the n incoming arms, in
// increasing bitmask order. Throws SizeLimitExceeded when n > max_incoming.
std::vector<SubsetSlack> check_collapsing(const LocalStar& star, const WeightFunction& w, const NormSpace& space,
                                          int max_incoming = 16);

struct SteinerCertificate {
  int vertex = -1;
  int degree = 0;
  std::vector<int> incoming_neighbors;  // maps subset indices to vertex ids
  int outgoing_neighbor = -1;
  double balancing_residual = 0.0;
  std::vector<SubsetSlack> collapsing_slacks;

  double min_slack() const;
};

struct Certificate {
  std::vector<SteinerCertificate> points;
  Tolerances tolerances;
  bool pass = true;

  double max_balancing_residual() const;
  double min_collapsing_slack() const;  // +inf when there are no Steiner points
  int max_steiner_degree() const;
};

// Evaluates both conditions at every Steiner point of a collapsed embedding.
// pass iff every residual <= tolerances.balancing and every slack >=
// -tolerances.collapsing. This certifies local-star optimality at each
// Steiner point; it is not a global optimality proof for trees with several
// Steiner points.
Certificate certify(const EmbeddedArborescence& arb, const Instance& inst, const Tolerances& tol = {});

struct SplitResult {
  EmbeddedArborescence arborescence;  // after re-optimising the split topology
  double cost_delta = 0.0;            // final cost minus original cost
  double split_delta = 0.0;           // cost change of the split move alone
  int new_vertex = -1;                // id of the inserted Steiner point
  Vector split_point;                 // its position before re-optimisation
};

// Detaches the incoming arms in `subset` from the Steiner point and routes them
// through a new Steiner point placed at centre + step * e, where e is the
// norming vector of sum_{i in I} w(t_i) p_i*, the direction of steepest
// first-order decrease. The step starts at 0.1 x the shortest incident edge and
// is halved until the cost drops. The resulting topology is then re-optimised.
// Throws PreconditionViolated when the subset's collapsing slack is not
// negative.
SplitResult split_improve(const EmbeddedArborescence& arb, int steiner_id, std::span<const int> subset,
                          const Instance& inst);
SplitResult split_improve(const EmbeddedArborescence& arb, int steiner_id, std::span<const int> subset,
                          const Instance& inst, const OptimizerConfig& cfg);

}  // namespace gilbert
