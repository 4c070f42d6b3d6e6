#include "gilbert/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "gilbert/flows.hpp"

namespace gilbert {

namespace {

constexpr int kMaxResolution = 2000;

struct Box {
  double lo[2];
  double hi[2];
};

Box inflated_box(const Instance& inst, double inflate) {
  Box box{{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity()},
          {-std::numeric_limits<double>::infinity(), -std::numeric_limits<double>::infinity()}};
  for (int t = 0; t < inst.terminal_count(); ++t) {
    const Vector& p = inst.terminal_position(t);
    for (int a = 0; a < 2; ++a) {
      box.lo[a] = std::min(box.lo[a], p[a]);
      box.hi[a] = std::max(box.hi[a], p[a]);
    }
  }
  const double widest = std::max(box.hi[0] - box.lo[0], box.hi[1] - box.lo[1]);
  for (int a = 0; a < 2; ++a) {
    const double w = box.hi[a] - box.lo[a];
    const double pad = inflate * (w > 0.0 ? w : widest);
    box.lo[a] -= pad;
    box.hi[a] += pad;
  }
  return box;
}

// |c|^p, raised to 1/p by root().
struct PowerNorm {
  double p;
  double pow(double c) const { return p == 2.0 ? c * c : std::pow(std::abs(c), p); }
  double root(double s) const { return p == 2.0 ? std::sqrt(s) : std::pow(s, 1.0 / p); }
};

struct TerminalArm {
  Vector position;
  double weight;
};

// Edges of a topology with at most two Steiner points, grouped by the
// Steiner point they touch.
struct StarSplit {
  std::vector<TerminalArm> first;   // terminal neighbours of Steiner point k
  std::vector<TerminalArm> second;  // terminal neighbours of Steiner point k+1
  double link_weight = 0.0;         // edge between the two Steiner points, 0 if absent
  double weight_sum = 0.0;
};

StarSplit split_edges(const Instance& inst, const SteinerTopology& topo) {
  const std::vector<double> supply = supply_vector(inst, topo.steiner_count);
  const std::vector<DirectedEdge> flows = assign_flows(topo, supply);
  StarSplit out;
  const int k = topo.terminal_count;
  for (const DirectedEdge& e : flows) {
    const double w = inst.weight(e.flow);
    out.weight_sum += w;
    const bool ts = topo.is_steiner(e.tail);
    const bool hs = topo.is_steiner(e.head);
    if (ts && hs) {
      out.link_weight = w;
      continue;
    }
    const int steiner = ts ? e.tail : e.head;
    const int terminal = ts ? e.head : e.tail;
    (steiner == k ? out.first : out.second).push_back({inst.terminal_position(terminal), w});
  }
  return out;
}

// Sum of weighted distances from each grid point (x0 + i dx, y0 + j dy) to
// the arms, stored row-major in i.
std::vector<double> star_table(const std::vector<TerminalArm>& arms, const PowerNorm& pn, double x0, double y0,
                               double dx, double dy, int n) {
  std::vector<double> table(static_cast<size_t>(n) * static_cast<size_t>(n), 0.0);
  std::vector<double> colp(static_cast<size_t>(n));
  std::vector<double> rowp(static_cast<size_t>(n));
  for (const TerminalArm& arm : arms) {
    for (int i = 0; i < n; ++i) colp[static_cast<size_t>(i)] = pn.pow(x0 + i * dx - arm.position[0]);
    for (int j = 0; j < n; ++j) rowp[static_cast<size_t>(j)] = pn.pow(y0 + j * dy - arm.position[1]);
    for (int i = 0; i < n; ++i) {
      double* row = &table[static_cast<size_t>(i) * static_cast<size_t>(n)];
      for (int j = 0; j < n; ++j) row[j] += arm.weight * pn.root(colp[static_cast<size_t>(i)] + rowp[static_cast<size_t>(j)]);
    }
  }
  return table;
}

struct PairBest {
  double value = std::numeric_limits<double>::infinity();
  int i1 = 0, j1 = 0, i2 = 0, j2 = 0;
};

// Exhaustive search over two n x n grids with common spacing (dx, dy) and
// origins o1, o2. Point-to-point distances depend only on the index offset,
// so they come from one (2n-1)^2 table; the inner loop is a min-plus scan.
PairBest pair_search(const StarSplit& split, const PowerNorm& pn, const double o1[2], const double o2[2], double dx,
                     double dy, int n) {
  const std::vector<double> a = star_table(split.first, pn, o1[0], o1[1], dx, dy, n);
  const std::vector<double> b = star_table(split.second, pn, o2[0], o2[1], dx, dy, n);
  const int m = 2 * n - 1;
  // link[r][c'] with r = i1 - i2 + n - 1 and c' = (n - 1) - (j1 - j2), so that
  // c' increases with j2.
  std::vector<double> link(static_cast<size_t>(m) * static_cast<size_t>(m));
  for (int r = 0; r < m; ++r) {
    const double ddx = (o1[0] - o2[0]) + (r - (n - 1)) * dx;
    for (int c = 0; c < m; ++c) {
      const double ddy = (o1[1] - o2[1]) + ((n - 1) - c) * dy;
      link[static_cast<size_t>(r) * static_cast<size_t>(m) + static_cast<size_t>(c)] =
          split.link_weight * pn.root(pn.pow(ddx) + pn.pow(ddy));
    }
  }

  PairBest best;
  for (int i1 = 0; i1 < n; ++i1) {
    for (int j1 = 0; j1 < n; ++j1) {
      const double base = a[static_cast<size_t>(i1) * static_cast<size_t>(n) + static_cast<size_t>(j1)];
      if (base >= best.value) continue;
      for (int i2 = 0; i2 < n; ++i2) {
        const double* brow = &b[static_cast<size_t>(i2) * static_cast<size_t>(n)];
        const double* lrow = &link[static_cast<size_t>(i1 - i2 + n - 1) * static_cast<size_t>(m) +
                                   static_cast<size_t>(n - 1 - j1)];
        double row_min = std::numeric_limits<double>::infinity();
#pragma omp simd reduction(min : row_min)
        for (int j2 = 0; j2 < n; ++j2) row_min = std::min(row_min, brow[j2] + lrow[j2]);
        if (base + row_min < best.value) {
          int j2 = 0;
          while (brow[j2] + lrow[j2] != row_min) ++j2;
          best = {base + row_min, i1, j1, i2, j2};
        }
      }
    }
  }
  return best;
}

void check_resolution(int r, const char* what) {
  if (r < 2 || r > kMaxResolution) {
    throw InvalidInput(std::string(what) + " must lie in [2, " + std::to_string(kMaxResolution) + "], got " +
                       std::to_string(r));
  }
}

Vector point(double x, double y) {
  Vector v(2);
  v << x, y;
  return v;
}

}  // namespace

OracleResult grid_solve(const Instance& inst, int resolution) {
  OracleOptions options;
  options.resolution = resolution;
  return grid_solve(inst, options);
}

OracleResult grid_solve(const Instance& inst, const OracleOptions& options) {
  validate_instance(inst);
  if (inst.space.dim() != 2) throw InvalidInput("the grid oracle works in the plane only");
  const int k = inst.terminal_count();
  if (k > 4) throw SizeLimitExceeded("the grid oracle handles at most two Steiner points");
  check_resolution(options.resolution, "resolution");
  check_resolution(options.coarse_resolution, "coarse resolution");
  check_resolution(options.refine_resolution, "refine resolution");

  const std::vector<SteinerTopology> topologies = enumerate_full(k);
  OracleResult out;
  out.topologies = static_cast<int>(topologies.size());
  if (k == 2) {
    out.arborescence = embed(inst, topologies.front(), {});
    out.cost = total_cost(out.arborescence);
    out.topology_key = canonicalize(topologies.front());
    return out;
  }

  const PowerNorm pn{inst.space.exponent()};
  const Box box = inflated_box(inst, options.inflate);
  const auto spacing = [&](int n) {
    return std::pair{(box.hi[0] - box.lo[0]) / (n - 1), (box.hi[1] - box.lo[1]) / (n - 1)};
  };

  if (k == 3) {
    const SteinerTopology& topo = topologies.front();
    const StarSplit split = split_edges(inst, topo);
    const int n = options.resolution;
    const auto [dx, dy] = spacing(n);
    const std::vector<double> table = star_table(split.first, pn, box.lo[0], box.lo[1], dx, dy, n);
    const auto it = std::min_element(table.begin(), table.end());
    const auto idx = static_cast<int>(it - table.begin());
    const Vector s = point(box.lo[0] + (idx / n) * dx, box.lo[1] + (idx % n) * dy);
    out.arborescence = embed(inst, topo, std::vector<Vector>{s});
    out.cost = total_cost(out.arborescence);
    out.spacing = std::max(dx, dy);
    out.bound = split.weight_sum * out.spacing * std::sqrt(2.0);
    out.topology_key = canonicalize(topo);
    return out;
  }

  // Two Steiner points.
  const int nc = options.coarse_resolution;
  const auto [cdx, cdy] = spacing(nc);
  const double coarse_spacing = std::max(cdx, cdy);
  struct Coarse {
    StarSplit split;
    PairBest best;
  };
  std::vector<Coarse> coarse;
  double coarse_min = std::numeric_limits<double>::infinity();
  for (const SteinerTopology& topo : topologies) {
    Coarse c{split_edges(inst, topo), {}};
    c.best = pair_search(c.split, pn, box.lo, box.lo, cdx, cdy, nc);
    coarse_min = std::min(coarse_min, c.best.value);
    coarse.push_back(std::move(c));
  }

  const int nr = options.refine_resolution;
  const double half = options.refine_halfwidth;
  const double rdx = 2.0 * half * cdx / (nr - 1);
  const double rdy = 2.0 * half * cdy / (nr - 1);
  double best_value = std::numeric_limits<double>::infinity();
  for (size_t t = 0; t < topologies.size(); ++t) {
    const Coarse& c = coarse[t];
    // A topology whose coarse value minus its Lipschitz bound already exceeds
    // the best coarse value cannot hold the optimum.
    if (c.best.value - c.split.weight_sum * coarse_spacing * std::sqrt(2.0) > coarse_min) continue;
    const double o1[2] = {box.lo[0] + (c.best.i1 - half) * cdx, box.lo[1] + (c.best.j1 - half) * cdy};
    const double o2[2] = {box.lo[0] + (c.best.i2 - half) * cdx, box.lo[1] + (c.best.j2 - half) * cdy};
    const PairBest fine = pair_search(c.split, pn, o1, o2, rdx, rdy, nr);
    if (fine.value < best_value) {
      best_value = fine.value;
      const std::vector<Vector> steiner{point(o1[0] + fine.i1 * rdx, o1[1] + fine.j1 * rdy),
                                        point(o2[0] + fine.i2 * rdx, o2[1] + fine.j2 * rdy)};
      out.arborescence = embed(inst, topologies[t], steiner);
      out.cost = total_cost(out.arborescence);
      out.spacing = std::max(rdx, rdy);
      out.bound = c.split.weight_sum * out.spacing * std::sqrt(2.0);
      out.topology_key = canonicalize(topologies[t]);
    }
  }
  return out;
}

double perturb_test(const EmbeddedArborescence& arb, const Instance& inst, int trials, double magnitude,
                    std::uint64_t seed) {
  if (!(arb.space == inst.space) || !(arb.weight == inst.weight)) {
    throw InvalidInput("arborescence and instance use different norms or weights");
  }
  if (trials < 0 || !(magnitude >= 0.0)) throw InvalidInput("trials and magnitude must be non-negative");
  const double base = total_cost(arb);
  const std::vector<int> steiner = arb.steiner_ids();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> offset(-magnitude, magnitude);
  const auto displaced = [&](int v) {
    Vector p = arb.vertices[static_cast<size_t>(v)].position;
    for (Eigen::Index i = 0; i < p.size(); ++i) p[i] += magnitude > 0.0 ? offset(rng) : 0.0;
    return p;
  };

  double worst = 0.0;
  for (int trial = 0; trial < trials; ++trial) {
    for (int v : steiner) {
      EmbeddedArborescence moved = arb;
      relocate(moved, v, displaced(v));
      worst = std::max(worst, base - total_cost(moved));
    }
    if (steiner.size() > 1) {
      EmbeddedArborescence moved = arb;
      for (int v : steiner) relocate(moved, v, displaced(v));
      worst = std::max(worst, base - total_cost(moved));
    }
  }
  return worst;
}

}  // namespace gilbert
