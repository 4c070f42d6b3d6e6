#include "gilbert/minkowski.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

namespace gilbert {

namespace {

void check_dim(const NormSpace& space, const Vector& v) {
  if (v.size() != space.dim()) {
    throw InvalidInput("dimension mismatch: vector has " + std::to_string(v.size()) +
                       " coordinates, space has dimension " + std::to_string(space.dim()));
  }
}

// Scaled evaluation of (sum |v_i|^p)^(1/p) that neither overflows nor
// underflows for large or tiny coordinates.
double lp_value(const Vector& v, double p) {
  const double m = v.cwiseAbs().maxCoeff();
  if (m == 0.0 || !std::isfinite(m)) return m;
  if (std::isinf(p)) return m;
  double sum = 0.0;
  if (p == 2.0) {
    for (double c : v) sum += (c / m) * (c / m);
    return m * std::sqrt(sum);
  }
  for (double c : v) sum += std::pow(std::abs(c) / m, p);
  return m * std::pow(sum, 1.0 / p);
}

// sign(v_i) (|v_i| / scale)^(p-1), the gradient of the L_p norm when
// scale = ||v||_p.
Vector signed_power(const Vector& v, double scale, double p) {
  Vector out(v.size());
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]) / scale;
    const double mag = (p == 2.0) ? a : std::pow(a, p - 1.0);
    out[i] = std::copysign(mag, v[i]);
    if (v[i] == 0.0) out[i] = 0.0;
  }
  return out;
}

}  // namespace

double NormSpace::dual_exponent() const {
  if (p_ == 1.0) return std::numeric_limits<double>::infinity();
  if (std::isinf(p_)) return 1.0;
  return p_ / (p_ - 1.0);
}

Validation validate_space(const NormSpace& space) {
  if (space.dim() < 2) return Rejection{"dimension must be at least 2"};
  if (space.kind() == NormKind::kEuclidean) return std::nullopt;
  const double p = space.exponent();
  if (std::isnan(p)) return Rejection{"exponent p is not a number"};
  if (std::isinf(p)) return Rejection{"norm not smooth (p = infinity)"};
  if (p < 1.0) return Rejection{"p < 1 does not define a norm"};
  if (p == 1.0) return Rejection{"norm not smooth (p = 1)"};
  return std::nullopt;
}

double norm(const NormSpace& space, const Vector& v) {
  check_dim(space, v);
  return lp_value(v, space.exponent());
}

double dual_norm(const NormSpace& space, const Vector& z) {
  check_dim(space, z);
  return lp_value(z, space.dual_exponent());
}

double zero_tolerance(const Vector& v) {
  return 1e-12 * (1.0 + (v.size() ? v.cwiseAbs().maxCoeff() : 0.0));
}

Vector dual_vector(const NormSpace& space, const Vector& x) {
  const double n = norm(space, x);
  if (!(n > zero_tolerance(x))) {
    throw DegenerateDirection("dual vector of a zero-length direction is undefined");
  }
  return signed_power(x, n, space.exponent());
}

Vector norm_gradient(const NormSpace& space, const Vector& x) {
  const double n = norm(space, x);
  if (!(n > 0.0)) throw DegenerateDirection("norm gradient at the origin is undefined");
  return signed_power(x, n, space.exponent());
}

Vector norming_vector(const NormSpace& space, const Vector& z) {
  const double n = dual_norm(space, z);
  if (!(n > zero_tolerance(z))) {
    throw DegenerateDirection("norming vector of a zero functional is undefined");
  }
  return signed_power(z, n, space.dual_exponent());
}

Matrix norm_hessian(const NormSpace& space, const Vector& x, double curvature_floor) {
  const double g = norm(space, x);
  if (!(g > 0.0)) throw DegenerateDirection("norm Hessian at the origin is undefined");
  const double p = space.exponent();
  const Vector u = signed_power(x, g, p);
  Matrix h = -(u * u.transpose());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    double r = std::abs(x[i]) / g;
    if (p < 2.0) r = std::max(r, curvature_floor);
    h(i, i) += (p == 2.0) ? 1.0 : std::pow(r, p - 2.0);
  }
  return h * ((p - 1.0) / g);
}

}  // namespace gilbert
