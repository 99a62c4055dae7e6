#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "polarprox/convex_sets.hpp"
#include "polarprox/lifted_point.hpp"

namespace polarprox {

/// Accuracy knobs for iterative projection oracles.
struct ProjectionSettings {
  double tolerance = 1e-8;
  int max_inner_iterations = 100000;
};

/// Projection onto an intersection of convex sets by Dykstra's algorithm with
/// cyclic corrections. Stops when successive cycle iterates move less than the
/// tolerance and every membership residual is below it. Throws
/// NonConvergenceError when the corrections fail to stabilize, which usually
/// signals an empty or numerically degenerate intersection.
LiftedPoint project_intersection_dykstra(const std::vector<ConvexSetPtr>& sets,
                                         const LiftedPoint& p,
                                         const ProjectionSettings& settings);

/// A convex function on the lifted space with a subgradient oracle. `value`
/// may return +infinity outside the domain; `subgradient` is only queried at
/// points with finite value.
struct LiftedFunction {
  std::function<double(const LiftedPoint&)> value;
  std::function<LiftedPoint(const LiftedPoint&)> subgradient;
  std::string name = "lifted-function";
};

/// Projection onto the sublevel set {g <= level} of a convex function given
/// only value/subgradient access. Builds supporting halfspaces at boundary
/// points (halfspace relaxations of the level constraint) and projects the
/// query onto their intersection until the iterate is feasible and stationary.
///
/// The returned point q satisfies g(q) <= level + settings.tolerance and sits
/// within a small multiple of the tolerance of the true projection. An
/// optional `domain` set is honored as a hard constraint; `feasible_anchor`
/// supplies a point with g <= level used to regularize cuts at points where g
/// is +infinity (defaults to the origin, which works for every gauge).
LiftedPoint project_sublevel_subgrad(const LiftedFunction& g, double level,
                                     const LiftedPoint& p,
                                     const ProjectionSettings& settings,
                                     const ConvexSet* domain = nullptr,
                                     const LiftedPoint* feasible_anchor = nullptr);

namespace detail {

/// Exact-ish projection of `p` onto {u : rows[i] . u <= rhs[i]} via an
/// active-set solve of the dual nonnegative least-squares problem. Intended
/// for modest row counts (the cutting projectors cap their windows).
Vector project_onto_halfspaces(const std::vector<Vector>& rows,
                               const std::vector<double>& rhs, const Vector& p,
                               bool* infeasible_hint = nullptr);

}  // namespace detail

}  // namespace polarprox
