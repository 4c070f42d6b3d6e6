#pragma once

#include <Eigen/Core>

#include "gilbert/error.hpp"

namespace gilbert {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class NormKind { kEuclidean, kLp };

// A norm on R^dim. Only smooth, strictly convex norms are supported by the
// solver; validate_space() says whether a given space qualifies. The value
// itself is unchecked so that rejected configurations can be represented.
class NormSpace {
 public:
  static NormSpace euclidean(int dim = 2) { return {NormKind::kEuclidean, 2.0, dim}; }
  static NormSpace lp(double p, int dim = 2) { return {NormKind::kLp, p, dim}; }

  NormKind kind() const { return kind_; }
  int dim() const { return dim_; }
  // Exponent p; 2 for the Euclidean norm.
  double exponent() const { return p_; }
  // q with 1/p + 1/q = 1 (infinity for p = 1).
  double dual_exponent() const;

  bool operator==(const NormSpace&) const = default;

 private:
  NormSpace(NormKind kind, double p, int dim) : kind_(kind), p_(p), dim_(dim) {}

  NormKind kind_;
  double p_;
  int dim_;
};

// Accepts the Euclidean norm and L_p with 1 < p < inf, dim >= 2.
Validation validate_space(const NormSpace& space);

// ||v||. Throws InvalidInput on dimension mismatch.
double norm(const NormSpace& space, const Vector& v);

// ||z||* = sup_{||x|| <= 1} <z, x>, i.e. the L_q norm of z.
double dual_norm(const NormSpace& space, const Vector& z);

// Threshold below which a vector counts as zero for dual_vector():
// 1e-12 * (1 + max |v_i|).
double zero_tolerance(const Vector& v);

/// Unique x* with <x*, x> = ||x|| and ||x*||* = 1; this is the gradient of
/// the norm at x. Throws DegenerateDirection when ||x|| <= zero_tolerance(x).
Vector dual_vector(const NormSpace& space, const Vector& x);

// Gradient of the norm at any x != 0, without the zero_tolerance() guard of
// dual_vector(). Used by the smoothed objective, where directions far below
// the guard are meaningful.
Vector norm_gradient(const NormSpace& space, const Vector& x);

/// Unit vector e (||e|| = 1) with <z, e> = ||z||*, the direction in which the
/// linear functional z grows fastest. Computed as the dual vector of z taken in
/// the dual space. Throws DegenerateDirection for z ~ 0.
Vector norming_vector(const NormSpace& space, const Vector& z);

// Hessian of the norm at x != 0 (no zero_tolerance() guard). For p < 2 the exact Hessian is unbounded on
// coordinate hyperplanes; coordinates with |x_i| < curvature_floor * ||x||
// are clamped to that floor.
Matrix norm_hessian(const NormSpace& space, const Vector& x, double curvature_floor = 1e-6);

}  // namespace gilbert
