#pragma once

#include <cstdint>

#include "gilbert/model.hpp"
#include "gilbert/topology.hpp"

namespace gilbert {

// Brute-force baselines, independent of the optimizer.

struct OracleOptions {
  int resolution = 2000;         // grid points per axis with one Steiner point
  int coarse_resolution = 100;   // two Steiner points: first pass per axis
  int refine_resolution = 200;   // two Steiner points: local pass per axis
  int refine_halfwidth = 2;      // local window, in coarse cells either side
  double inflate = 0.10;         // bounding box growth on each side
};

struct OracleResult {
  EmbeddedArborescence arborescence;
  double cost = 0.0;
  // L * delta * sqrt(2), L the sum of edge weights of the winning topology and
  // delta the finest grid spacing used.
  double bound = 0.0;
  double spacing = 0.0;
  CanonicalKey topology_key;
  int topologies = 0;
};

// Exhaustive search over Steiner coordinates on a regular grid spanning the
// inflated terminal bounding box, for every full topology. Supports up to two
// Steiner points in the plane (at most three terminals plus the sink); the
// two-point case runs a coarse pass and then a local refinement around the
// best coarse cell of every topology that the coarse bound cannot exclude.
// Ties go to the lowest grid index. Throws SizeLimitExceeded beyond two
// Steiner points and InvalidInput for resolutions outside [2, 2000].
OracleResult grid_solve(const Instance& inst, int resolution);
OracleResult grid_solve(const Instance& inst, const OracleOptions& options);

// Largest cost decrease observed when Steiner points are displaced by vectors
// with coordinates uniform in [-magnitude, magnitude]: each point alone, then
// all points jointly, `trials` times. Returns 0 if nothing decreases.
double perturb_test(const EmbeddedArborescence& arb, const Instance& inst, int trials, double magnitude,
                    std::uint64_t seed = 0);

}  // namespace gilbert
