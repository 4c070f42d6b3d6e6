#include "gilbert/optimizer.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <string>

#include "gilbert/flows.hpp"

namespace gilbert {

namespace {

// Sum of w_e * phi(x_tail - x_head) over the edges of a tree whose Steiner
// coordinates are stacked into one vector, phi being the norm or its
// smoothing sqrt(||v||^2 + eps^2).
class TreeObjective {
 public:
  explicit TreeObjective(const EmbeddedArborescence& arb) : space_(arb.space), dim_(arb.space.dim()) {
    block_.assign(arb.vertices.size(), -1);
    for (const Vertex& v : arb.vertices) {
      fixed_.push_back(v.position);
      if (v.role == Role::kSteiner) {
        block_[static_cast<size_t>(v.id)] = static_cast<int>(steiner_.size());
        steiner_.push_back(v.id);
      }
    }
    for (const Edge& e : arb.edges) arcs_.push_back({e.tail, e.head, e.weight});
  }

  Eigen::Index size() const { return static_cast<Eigen::Index>(steiner_.size()) * dim_; }

  double weight_sum() const {
    double s = 0.0;
    for (const Arc& a : arcs_) s += a.weight;
    return s;
  }

  Vector pack(const EmbeddedArborescence& arb) const {
    Vector x(size());
    for (size_t i = 0; i < steiner_.size(); ++i) {
      x.segment(static_cast<Eigen::Index>(i) * dim_, dim_) = arb.vertices[static_cast<size_t>(steiner_[i])].position;
    }
    return x;
  }

  void unpack(const Vector& x, EmbeddedArborescence& arb) const {
    for (size_t i = 0; i < steiner_.size(); ++i) {
      relocate(arb, steiner_[i], x.segment(static_cast<Eigen::Index>(i) * dim_, dim_));
    }
  }

  double evaluate(const Vector& x, double eps, Vector* grad, Matrix* hess) const {
    if (grad) grad->setZero(size());
    if (hess) hess->setZero(size(), size());
    double value = 0.0;
    for (const Arc& arc : arcs_) {
      const int bt = block_[static_cast<size_t>(arc.tail)];
      const int bh = block_[static_cast<size_t>(arc.head)];
      const Vector d = position(x, arc.tail) - position(x, arc.head);
      const double g = norm(space_, d);
      const double phi = eps > 0.0 ? std::hypot(g, eps) : g;
      value += arc.weight * phi;
      if (!grad && !hess) continue;

      Vector gd = Vector::Zero(dim_);
      Matrix hd;
      if (g > 0.0) {
        const Vector u = norm_gradient(space_, d);
        gd = (g / phi) * u;
        if (hess) {
          hd = (g / phi) * norm_hessian(space_, d);
          if (eps > 0.0) hd += (eps * eps / (phi * phi * phi)) * (u * u.transpose());
        }
      } else if (hess) {
        // Coincident endpoints: only reachable while smoothing.
        hd = Matrix::Identity(dim_, dim_) / std::max(eps, std::numeric_limits<double>::min());
      }
      gd *= arc.weight;
      if (hess) hd *= arc.weight;
      if (bt >= 0) {
        if (grad) grad->segment(bt * dim_, dim_) += gd;
        if (hess) hess->block(bt * dim_, bt * dim_, dim_, dim_) += hd;
      }
      if (bh >= 0) {
        if (grad) grad->segment(bh * dim_, dim_) -= gd;
        if (hess) hess->block(bh * dim_, bh * dim_, dim_, dim_) += hd;
      }
      if (hess && bt >= 0 && bh >= 0) {
        hess->block(bt * dim_, bh * dim_, dim_, dim_) -= hd;
        hess->block(bh * dim_, bt * dim_, dim_, dim_) -= hd;
      }
    }
    return value;
  }

 private:
  struct Arc {
    int tail;
    int head;
    double weight;
  };

  Vector position(const Vector& x, int v) const {
    const int b = block_[static_cast<size_t>(v)];
    return b >= 0 ? Vector(x.segment(b * dim_, dim_)) : fixed_[static_cast<size_t>(v)];
  }

  NormSpace space_;
  int dim_;
  std::vector<Vector> fixed_;
  std::vector<int> block_;
  std::vector<int> steiner_;
  std::vector<Arc> arcs_;
};

// Newton direction on H + mu I, raising mu until the factorisation succeeds.
Vector newton_direction(const Matrix& hess, const Vector& grad) {
  const Eigen::Index n = grad.size();
  const double diag = std::max(hess.diagonal().cwiseAbs().maxCoeff(), 1e-300);
  double mu = 0.0;
  for (int attempt = 0; attempt < 40; ++attempt) {
    Eigen::LLT<Matrix> llt(hess + mu * Matrix::Identity(n, n));
    if (llt.info() == Eigen::Success) {
      Vector dir = llt.solve(-grad);
      if (dir.allFinite()) return dir;
    }
    mu = mu == 0.0 ? 1e-12 * diag : 10.0 * mu;
  }
  return -grad;
}

// Damped Newton with Armijo backtracking. Near the minimum the objective can
// no longer resolve the decrease, so a full step that halves the gradient is
// accepted as well. Returns the final objective value; throws
// ConvergenceFailure past max_iterations.
double minimize(const TreeObjective& obj, Vector& x, double eps, const OptimizerConfig& cfg, long& iterations,
                const EmbeddedArborescence& shape) {
  Vector grad;
  Matrix hess;
  double f = obj.evaluate(x, eps, &grad, &hess);
  if (obj.size() == 0) return f;
  const double grad_tol = 1e-14 * obj.weight_sum();
  int quiet_steps = 0;
  double best_gnorm = grad.lpNorm<Eigen::Infinity>();
  for (long it = 0;; ++it) {
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    if (gnorm <= grad_tol) break;
    if (it >= cfg.max_iterations) {
      EmbeddedArborescence best = shape;
      obj.unpack(x, best);
      throw ConvergenceFailure("no convergence within " + std::to_string(cfg.max_iterations) + " iterations",
                               std::move(best));
    }
    ++iterations;
    Vector dir = newton_direction(hess, grad);
    double slope = grad.dot(dir);
    if (!(slope < 0.0)) {
      dir = -grad;
      slope = -grad.squaredNorm();
    }

    double step = 1.0;
    bool accepted = false;
    Vector trial;
    double f_trial = f;
    for (int ls = 0; ls < 60; ++ls) {
      trial = x + step * dir;
      f_trial = obj.evaluate(trial, eps, nullptr, nullptr);
      if (f_trial <= f + 1e-4 * step * slope) {
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    Vector grad_trial;
    Matrix hess_trial;
    if (!accepted) {
      trial = x + dir;
      f_trial = obj.evaluate(trial, eps, &grad_trial, &hess_trial);
      const bool flat = f_trial <= f + 1e-13 * std::abs(f);
      if (!flat || !(grad_trial.lpNorm<Eigen::Infinity>() <= 0.5 * gnorm)) break;
    } else {
      f_trial = obj.evaluate(trial, eps, &grad_trial, &hess_trial);
    }

    const double decrease = f - f_trial;
    x = std::move(trial);
    f = f_trial;
    grad = std::move(grad_trial);
    hess = std::move(hess_trial);
    // Progress means a visible decrease or a gradient well below the best so
    // far; the latter rules out cycling between two points.
    const double g_new = grad.lpNorm<Eigen::Infinity>();
    const bool progress = decrease > cfg.cost_rel_tol * std::abs(f) || g_new <= 0.5 * best_gnorm;
    best_gnorm = std::min(best_gnorm, g_new);
    quiet_steps = progress ? 0 : quiet_steps + 1;
    if (quiet_steps >= 3) break;
  }
  return f;
}

bool has_short_edge(const EmbeddedArborescence& arb, double eps_merge) {
  return std::any_of(arb.edges.begin(), arb.edges.end(), [&](const Edge& e) { return e.length < eps_merge; });
}

}  // namespace

void validate_config(const OptimizerConfig& cfg) {
  const bool positive = cfg.smoothing_eps_initial > 0 && cfg.smoothing_eps_final > 0 &&
                        cfg.smoothing_stage_factor > 0 && cfg.max_iterations > 0 && cfg.cost_rel_tol > 0 &&
                        cfg.balancing_tol > 0 && cfg.collapsing_tol > 0 && cfg.merge_eps > 0 &&
                        cfg.max_terminals > 0 && cfg.tie_rel_tol >= 0;
  if (!positive) throw InvalidInput("optimizer configuration values must be positive");
  if (!(cfg.smoothing_eps_final < cfg.smoothing_eps_initial)) {
    throw InvalidInput("smoothing_eps_final must be below smoothing_eps_initial");
  }
  if (!(cfg.smoothing_stage_factor < 1.0)) throw InvalidInput("smoothing_stage_factor must be below 1");
}

std::vector<Vector> initial_steiner_positions(const Instance& inst, const SteinerTopology& topo) {
  const int s = topo.steiner_count;
  const int dim = inst.space.dim();
  if (s == 0) return {};
  // Each Steiner point at the mean of its neighbours: L x = b.
  Matrix lap = Matrix::Zero(s, s);
  Matrix rhs = Matrix::Zero(s, dim);
  for (const auto& [a, b] : topo.edges) {
    for (const auto& [u, v] : {std::pair{a, b}, std::pair{b, a}}) {
      if (!topo.is_steiner(u)) continue;
      const int i = u - topo.terminal_count;
      lap(i, i) += 1.0;
      if (topo.is_steiner(v)) {
        lap(i, v - topo.terminal_count) -= 1.0;
      } else {
        rhs.row(i) += inst.terminal_position(v).transpose();
      }
    }
  }
  const Matrix sol = lap.fullPivLu().solve(rhs);
  std::vector<Vector> out;
  for (int i = 0; i < s; ++i) out.emplace_back(sol.row(i).transpose());
  return out;
}

FixedTopologyResult optimize_embedding(const EmbeddedArborescence& start, double scale, const OptimizerConfig& cfg) {
  validate_config(cfg);
  if (!(scale > 0.0)) throw InvalidInput("length scale must be positive");
  FixedTopologyResult result{start, 0.0, {}};
  EmbeddedArborescence& arb = result.arborescence;
  OptimizerTrace& trace = result.trace;

  if (!arb.steiner_ids().empty()) {
    const TreeObjective smoothed(arb);
    Vector x = smoothed.pack(arb);
    const double eps_final = cfg.smoothing_eps_final * scale;
    for (double eps = cfg.smoothing_eps_initial * scale;; eps = std::max(eps * cfg.smoothing_stage_factor, eps_final)) {
      trace.stage_costs.push_back(minimize(smoothed, x, eps, cfg, trace.iterations, arb));
      if (eps <= eps_final) break;
    }
    smoothed.unpack(x, arb);
  }

  const double eps_merge = cfg.merge_eps * scale;
  for (int round = 0; round < 8; ++round) {
    arb = collapse_degenerate(arb, eps_merge);
    const TreeObjective exact(arb);
    Vector x = exact.pack(arb);
    minimize(exact, x, 0.0, cfg, trace.iterations, arb);
    exact.unpack(x, arb);
    if (!has_short_edge(arb, eps_merge)) break;
  }
  result.cost = total_cost(arb);
  trace.stage_costs.push_back(result.cost);
  return result;
}

FixedTopologyResult optimize_fixed_topology(const Instance& inst, const SteinerTopology& topo,
                                            std::span<const Vector> initial_steiner, const OptimizerConfig& cfg) {
  validate_instance(inst);
  const EmbeddedArborescence start = embed(inst, topo, initial_steiner);
  return optimize_embedding(start, diameter(inst), cfg);
}

FixedTopologyResult optimize_fixed_topology(const Instance& inst, const SteinerTopology& topo,
                                            const OptimizerConfig& cfg) {
  const std::vector<Vector> init = initial_steiner_positions(inst, topo);
  return optimize_fixed_topology(inst, topo, init, cfg);
}

SolveResult solve(const Instance& inst, const OptimizerConfig& cfg) {
  validate_instance(inst);
  validate_config(cfg);
  const std::vector<SteinerTopology> topologies = enumerate_full(inst.terminal_count(), cfg.max_terminals);

  struct Candidate {
    FixedTopologyResult result;
    CanonicalKey key;
  };
  std::vector<Candidate> candidates;
  SolveResult out;
  std::optional<EmbeddedArborescence> last_failure;
  for (const SteinerTopology& topo : topologies) {
    ++out.topologies_examined;
    try {
      FixedTopologyResult r = optimize_fixed_topology(inst, topo, cfg);
      out.iterations += r.trace.iterations;
      candidates.push_back({std::move(r), canonicalize(topo)});
    } catch (const ConvergenceFailure& e) {
      ++out.topologies_failed;
      std::clog << "gilbert: topology " << canonicalize(topo) << " skipped: " << e.what() << '\n';
      last_failure = e.best_iterate();
    }
  }
  if (candidates.empty()) {
    throw ConvergenceFailure("optimisation failed for every topology", std::move(*last_failure));
  }

  // Cheapest first; costs within tie_rel_tol of a group's cheapest member are
  // ordered by canonical key.
  std::stable_sort(candidates.begin(), candidates.end(),
                   [](const Candidate& a, const Candidate& b) { return a.result.cost < b.result.cost; });
  std::vector<size_t> order;
  for (size_t begin = 0; begin < candidates.size();) {
    const double limit = candidates[begin].result.cost * (1.0 + cfg.tie_rel_tol);
    size_t end = begin;
    while (end < candidates.size() && candidates[end].result.cost <= limit) ++end;
    std::vector<size_t> group;
    for (size_t i = begin; i < end; ++i) group.push_back(i);
    std::sort(group.begin(), group.end(), [&](size_t a, size_t b) { return candidates[a].key < candidates[b].key; });
    order.insert(order.end(), group.begin(), group.end());
    begin = end;
  }

  const Tolerances tol{cfg.balancing_tol, cfg.collapsing_tol};
  std::optional<size_t> chosen;
  Certificate chosen_cert;
  for (size_t idx : order) {
    Certificate cert = certify(candidates[idx].result.arborescence, inst, tol);
    if (cert.pass || !chosen) {
      chosen = idx;
      chosen_cert = std::move(cert);
    }
    if (chosen_cert.pass) break;
  }

  Candidate& best = candidates[*chosen];
  out.arborescence = std::move(best.result.arborescence);
  out.cost = best.result.cost;
  out.topology_key = best.key;
  out.certificate = std::move(chosen_cert);
  return out;
}

}  // namespace gilbert
