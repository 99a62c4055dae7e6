#include "polarprox/convex_sets.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>
#include <stdexcept>

namespace polarprox {

std::string norm_kind_name(NormKind kind) {
  switch (kind) {
    case NormKind::L1: return "l1";
    case NormKind::L2: return "l2";
    case NormKind::Linf: return "linf";
  }
  return "?";
}

LiftedPoint project_S(const LiftedPoint& p) { return {p.base, 1.0}; }

BoxSet::BoxSet(LiftedPoint lower, LiftedPoint upper)
    : lower_(std::move(lower)), upper_(std::move(upper)) {
  if (lower_.dim() != upper_.dim())
    throw std::invalid_argument("box: corner dimensions differ");
  for (int i = 0; i < lower_.dim(); ++i)
    if (lower_.base(i) > upper_.base(i))
      throw std::invalid_argument("box: lower > upper in base coordinate " +
                                  std::to_string(i));
  if (lower_.height > upper_.height)
    throw std::invalid_argument("box: lower > upper in height coordinate");
}

bool BoxSet::contains(const LiftedPoint& p, double tol) const {
  for (int i = 0; i < p.dim(); ++i)
    if (p.base(i) < lower_.base(i) - tol || p.base(i) > upper_.base(i) + tol)
      return false;
  return p.height >= lower_.height - tol && p.height <= upper_.height + tol;
}

LiftedPoint BoxSet::project(const LiftedPoint& p) const {
  LiftedPoint q = p;
  for (int i = 0; i < p.dim(); ++i)
    q.base(i) = std::clamp(p.base(i), lower_.base(i), upper_.base(i));
  q.height = std::clamp(p.height, lower_.height, upper_.height);
  return q;
}

std::string BoxSet::descriptor() const {
  std::ostringstream os;
  os << "box[dim=" << lower_.dim() + 1 << "]";
  return os.str();
}

HalfspaceSet::HalfspaceSet(LiftedPoint normal, double offset)
    : normal_(std::move(normal)), offset_(offset), normal_sq_(squared_norm(normal_)) {
  if (normal_sq_ <= 0.0)
    throw std::invalid_argument("halfspace: zero normal");
}

bool HalfspaceSet::contains(const LiftedPoint& p, double tol) const {
  return dot(normal_, p) <= offset_ + tol * std::sqrt(normal_sq_);
}

LiftedPoint HalfspaceSet::project(const LiftedPoint& p) const {
  const double slack = dot(normal_, p) - offset_;
  if (slack <= 0.0) return p;
  return p - (slack / normal_sq_) * normal_;
}

std::string HalfspaceSet::descriptor() const {
  std::ostringstream os;
  os << "halfspace[offset=" << offset_ << "]";
  return os.str();
}

BallSet::BallSet(LiftedPoint center, double radius, NormKind kind)
    : center_(std::move(center)), radius_(radius), kind_(kind) {
  if (radius_ < 0.0) throw std::invalid_argument("ball: negative radius");
}

double lifted_norm(const LiftedPoint& p, NormKind kind) {
  switch (kind) {
    case NormKind::L1: return p.base.lpNorm<1>() + std::abs(p.height);
    case NormKind::L2: return norm(p);
    case NormKind::Linf:
      return std::max(p.dim() > 0 ? p.base.lpNorm<Eigen::Infinity>() : 0.0,
                      std::abs(p.height));
  }
  return 0.0;
}

namespace {

// Euclidean projection onto the l1 ball of given radius, centered at zero.
Vector project_l1_ball(const Vector& w, double radius) {
  const double l1 = w.lpNorm<1>();
  if (l1 <= radius) return w;
  Vector a = w.cwiseAbs();
  std::vector<double> sorted(a.data(), a.data() + a.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<double>());
  double cumulative = 0.0, theta = 0.0;
  for (size_t k = 0; k < sorted.size(); ++k) {
    cumulative += sorted[k];
    const double candidate = (cumulative - radius) / static_cast<double>(k + 1);
    if (sorted[k] - candidate > 0.0) theta = candidate;
  }
  Vector out(w.size());
  for (int i = 0; i < w.size(); ++i) {
    const double mag = std::max(std::abs(w(i)) - theta, 0.0);
    out(i) = (w(i) >= 0 ? mag : -mag);
  }
  return out;
}

}  // namespace

bool BallSet::contains(const LiftedPoint& p, double tol) const {
  return lifted_norm(p - center_, kind_) <= radius_ + tol;
}

LiftedPoint BallSet::project(const LiftedPoint& p) const {
  const LiftedPoint w = p - center_;
  switch (kind_) {
    case NormKind::Linf: {
      LiftedPoint q = w;
      for (int i = 0; i < q.dim(); ++i) q.base(i) = std::clamp(q.base(i), -radius_, radius_);
      q.height = std::clamp(q.height, -radius_, radius_);
      return center_ + q;
    }
    case NormKind::L2: {
      const double n = norm(w);
      if (n <= radius_) return p;
      return center_ + (radius_ / n) * w;
    }
    case NormKind::L1: {
      const Vector flat = flatten(w);
      return center_ + unflatten(project_l1_ball(flat, radius_));
    }
  }
  return p;
}

std::string BallSet::descriptor() const {
  std::ostringstream os;
  os << norm_kind_name(kind_) << "-ball[r=" << radius_ << "]";
  return os.str();
}

LiftedPoint project_box(const LiftedPoint& lower, const LiftedPoint& upper,
                        const LiftedPoint& p) {
  return BoxSet(lower, upper).project(p);
}

LiftedPoint project_halfspace(const LiftedPoint& normal, double offset,
                              const LiftedPoint& p) {
  return HalfspaceSet(normal, offset).project(p);
}

LiftedPoint project_ball(const LiftedPoint& center, double radius, NormKind kind,
                         const LiftedPoint& p) {
  return BallSet(center, radius, kind).project(p);
}

}  // namespace polarprox
