#pragma once

#include <functional>
#include <optional>
#include <string>
#include <utility>

#include "polarprox/lifted_point.hpp"

namespace polarprox {

/// A proper closed nonnegative convex function on X together with the oracles
/// the perspective-transform machinery needs: value, one subgradient, and the
/// recession function (the growth at infinity, used at height zero).
/// `known_min` carries ground truth (min value and one minimizer) when the
/// instance has a closed form; facial verification requires it.
struct ConvexFunctionSpec {
  int dim = 1;
  std::string name = "f";
  std::function<double(const Vector&)> value;
  std::function<Vector(const Vector&)> subgradient;
  std::function<double(const Vector&)> recession;
  std::optional<std::pair<double, Vector>> known_min;
  /// Euclidean projection onto {f <= level}, defined for level >= min f.
  /// Optional; when present (with known_min) the perspective machinery uses a
  /// fast exact height-reduction instead of subgradient relaxations.
  std::function<Vector(double level, const Vector&)> base_sublevel_project;
};

/// f(x) = |x - center| + offset on R. Recession |x|.
ConvexFunctionSpec make_shifted_abs(double center, double offset);

/// f(x) = ||x - center||^2 + offset. Recession is the indicator of {0}
/// (returns +infinity off the origin).
ConvexFunctionSpec make_shifted_quadratic(Vector center, double offset);

/// f == value (constant). Recession 0.
ConvexFunctionSpec make_constant(double value, int dim);

/// f(x) = max(|x - center| - halfwidth, 0) + offset on R; flat bottom so the
/// minimizer set is the interval [center - halfwidth, center + halfwidth].
ConvexFunctionSpec make_plateau(double center, double halfwidth, double offset);

}  // namespace polarprox
