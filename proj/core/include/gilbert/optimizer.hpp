#pragma once

#include <span>
#include <string>
#include <vector>

#include "gilbert/certify.hpp"
#include "gilbert/model.hpp"
#include "gilbert/topology.hpp"

namespace gilbert {

// Length-like quantities are relative to the instance diameter.
struct OptimizerConfig {
  double smoothing_eps_initial = 1e-3;
  double smoothing_eps_final = 1e-12;
  double smoothing_stage_factor = 0.1;
  long max_iterations = 100000;  // per smoothing stage
  double cost_rel_tol = 1e-12;
  double balancing_tol = 1e-8;
  double collapsing_tol = 1e-8;
  double merge_eps = 1e-9;
  int max_terminals = kDefaultMaxTerminals;
  // Relative cost difference under which two topologies count as tied.
  double tie_rel_tol = 1e-10;
};

// Throws InvalidInput unless every field is positive and the smoothing
// schedule decreases.
void validate_config(const OptimizerConfig& cfg);

struct OptimizerTrace {
  // Smoothed objective at the end of each smoothing stage, followed by the
  // exact cost after the final polish. Non-increasing.
  std::vector<double> stage_costs;
  long iterations = 0;
};

struct FixedTopologyResult {
  EmbeddedArborescence arborescence;  // collapsed
  double cost = 0.0;
  OptimizerTrace trace;
};

class ConvergenceFailure : public Error {
 public:
  ConvergenceFailure(const std::string& what, EmbeddedArborescence best)
      : Error(what), best_(std::move(best)) {}
  const EmbeddedArborescence& best_iterate() const { return best_; }

 private:
  EmbeddedArborescence best_;
};

// Minimises sum_e w_e ||x_tail - x_head|| over the Steiner coordinates of a
// fixed topology. Uses a smoothing homotopy ||v|| -> sqrt(||v||^2 + eps^2)
// with damped Newton steps and backtracking, contracts edges shorter than
// merge_eps * diameter, and polishes the contracted tree on the exact
// objective. Steiner points start at the centroid of their neighbours (the
// harmonic extension of the terminal positions).
FixedTopologyResult optimize_fixed_topology(const Instance& inst, const SteinerTopology& topo,
                                            const OptimizerConfig& cfg = {});

// As above from caller-supplied Steiner positions.
FixedTopologyResult optimize_fixed_topology(const Instance& inst, const SteinerTopology& topo,
                                            std::span<const Vector> initial_steiner, const OptimizerConfig& cfg);

// Same pipeline on an arbitrary embedded tree (terminals fixed, Steiner points
// free, flows kept). `scale` sets the length scale for smoothing and merging.
FixedTopologyResult optimize_embedding(const EmbeddedArborescence& start, double scale, const OptimizerConfig& cfg);

// Centroid-of-neighbours starting positions for the Steiner points of topo.
std::vector<Vector> initial_steiner_positions(const Instance& inst, const SteinerTopology& topo);

struct SolveResult {
  EmbeddedArborescence arborescence;
  Certificate certificate;
  double cost = 0.0;
  CanonicalKey topology_key;  // full topology that produced the result
  int topologies_examined = 0;
  int topologies_failed = 0;  // convergence failures, skipped
  long iterations = 0;
  bool certified() const { return certificate.pass; }
};

// Optimises every full topology, orders the results by cost (ties within
// tie_rel_tol broken by smallest canonical key) and returns the first that
// certifies; if none does, returns the cheapest with a failing certificate.
// Throws SizeLimitExceeded past max_terminals and ConvergenceFailure when
// every topology fails.
SolveResult solve(const Instance& inst, const OptimizerConfig& cfg = {});

}  // namespace gilbert
