#pragma once

#include <memory>
#include <string>
#include <vector>

#include "polarprox/lifted_point.hpp"

namespace polarprox {

enum class NormKind { L1, L2, Linf };

std::string norm_kind_name(NormKind kind);

/// Norm of a lifted point treated as a plain (d+1)-vector.
double lifted_norm(const LiftedPoint& p, NormKind kind);

/// Projection oracle for a closed convex subset of the lifted space.
///
/// Contract: project is idempotent up to the oracle's accuracy, project(p) == p
/// whenever contains(p, tol) holds, and the projection satisfies the usual
/// obtuse-angle inequality against members of the set.
class ConvexSet {
 public:
  virtual ~ConvexSet() = default;

  /// Membership within an absolute tolerance on the constraint residual.
  virtual bool contains(const LiftedPoint& p, double tol) const = 0;
  virtual LiftedPoint project(const LiftedPoint& p) const = 0;
  virtual std::string descriptor() const = 0;

  /// Lifted-space dimension the set lives in, or -1 when dimension-agnostic.
  virtual int dim() const { return -1; }
};

using ConvexSetPtr = std::shared_ptr<const ConvexSet>;

/// Exact projection onto the slice S = X x {1}: (y, lambda) -> (y, 1).
LiftedPoint project_S(const LiftedPoint& p);

/// Axis-aligned box given by lifted lower/upper corners. Rejects lower > upper.
class BoxSet final : public ConvexSet {
 public:
  BoxSet(LiftedPoint lower, LiftedPoint upper);
  bool contains(const LiftedPoint& p, double tol) const override;
  LiftedPoint project(const LiftedPoint& p) const override;
  std::string descriptor() const override;

  int dim() const override { return lower_.dim() + 1; }

  const LiftedPoint& lower() const { return lower_; }
  const LiftedPoint& upper() const { return upper_; }

 private:
  LiftedPoint lower_, upper_;
};

/// Halfspace {p : <normal, p> <= offset}. Rejects a zero normal.
class HalfspaceSet final : public ConvexSet {
 public:
  HalfspaceSet(LiftedPoint normal, double offset);
  bool contains(const LiftedPoint& p, double tol) const override;
  LiftedPoint project(const LiftedPoint& p) const override;
  std::string descriptor() const override;

  int dim() const override { return normal_.dim() + 1; }

  const LiftedPoint& normal() const { return normal_; }
  double offset() const { return offset_; }

 private:
  LiftedPoint normal_;
  double offset_;
  double normal_sq_;
};

/// Norm ball of the lifted space. The projection is always the Euclidean
/// nearest point of the ball (sorted-threshold for l1, clamp for linf, radial
/// scaling for l2). Rejects a negative radius.
class BallSet final : public ConvexSet {
 public:
  BallSet(LiftedPoint center, double radius, NormKind kind);
  bool contains(const LiftedPoint& p, double tol) const override;
  LiftedPoint project(const LiftedPoint& p) const override;
  std::string descriptor() const override;

  int dim() const override { return center_.dim() + 1; }

  double radius() const { return radius_; }
  NormKind kind() const { return kind_; }

 private:
  LiftedPoint center_;
  double radius_;
  NormKind kind_;
};

/// The whole space; projection is the identity.
class WholeSpaceSet final : public ConvexSet {
 public:
  bool contains(const LiftedPoint&, double) const override { return true; }
  LiftedPoint project(const LiftedPoint& p) const override { return p; }
  std::string descriptor() const override { return "whole-space"; }
};

// Spec-shaped convenience wrappers.
LiftedPoint project_box(const LiftedPoint& lower, const LiftedPoint& upper,
                        const LiftedPoint& p);
LiftedPoint project_halfspace(const LiftedPoint& normal, double offset,
                              const LiftedPoint& p);
LiftedPoint project_ball(const LiftedPoint& center, double radius, NormKind kind,
                         const LiftedPoint& p);

}  // namespace polarprox
