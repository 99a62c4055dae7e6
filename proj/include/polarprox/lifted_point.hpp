#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <utility>

namespace polarprox {

using Vector = Eigen::VectorXd;

/// A point (y, lambda) in the lifted space X x R. `base` is the X-part,
/// `height` is the scalar R-coordinate. All operators in this library act on
/// lifted points; the iteration slice S = X x {1} is the set of points with
/// height exactly 1.
struct LiftedPoint {
  Vector base;
  double height = 0.0;

  LiftedPoint() = default;
  LiftedPoint(Vector b, double h) : base(std::move(b)), height(h) {}

  int dim() const { return static_cast<int>(base.size()); }

  bool all_finite() const {
    if (!std::isfinite(height)) return false;
    return base.allFinite();
  }

  static LiftedPoint zero(int base_dim) { return {Vector::Zero(base_dim), 0.0}; }

  /// Embed an X-vector into the slice S = X x {1}.
  static LiftedPoint lift(Vector v) { return {std::move(v), 1.0}; }
};

inline LiftedPoint operator+(const LiftedPoint& a, const LiftedPoint& b) {
  return {a.base + b.base, a.height + b.height};
}

inline LiftedPoint operator-(const LiftedPoint& a, const LiftedPoint& b) {
  return {a.base - b.base, a.height - b.height};
}

inline LiftedPoint operator*(double t, const LiftedPoint& p) {
  return {t * p.base, t * p.height};
}

inline double dot(const LiftedPoint& a, const LiftedPoint& b) {
  return a.base.dot(b.base) + a.height * b.height;
}

inline double squared_norm(const LiftedPoint& p) {
  return p.base.squaredNorm() + p.height * p.height;
}

inline double norm(const LiftedPoint& p) { return std::sqrt(squared_norm(p)); }

inline double distance(const LiftedPoint& a, const LiftedPoint& b) {
  return norm(a - b);
}

/// Flatten to a plain vector (base coordinates first, height last).
inline Vector flatten(const LiftedPoint& p) {
  Vector v(p.dim() + 1);
  v.head(p.dim()) = p.base;
  v(p.dim()) = p.height;
  return v;
}

inline LiftedPoint unflatten(const Vector& v) {
  LiftedPoint p;
  p.base = v.head(v.size() - 1);
  p.height = v(v.size() - 1);
  return p;
}

}  // namespace polarprox
