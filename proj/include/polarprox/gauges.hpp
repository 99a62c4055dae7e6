#pragma once

#include <memory>
#include <optional>
#include <string>

#include "polarprox/convex_sets.hpp"
#include "polarprox/functions.hpp"
#include "polarprox/lifted_point.hpp"
#include "polarprox/projections.hpp"

namespace polarprox {

/// A closed gauge on the lifted space: nonnegative, convex, positively
/// homogeneous, lower semicontinuous, vanishing at the origin. Evaluation may
/// return +infinity outside the domain. Instances are immutable after
/// construction and safe for concurrent use.
class Gauge {
 public:
  virtual ~Gauge() = default;

  /// Gauge value in [0, +inf].
  virtual double eval(const LiftedPoint& p) const = 0;

  /// Projection onto the sublevel set {eval <= r}, r >= 0. Returns p when
  /// eval(p) <= r already.
  virtual LiftedPoint sublevel_project(double r, const LiftedPoint& p) const = 0;

  /// Projection onto the closure of the domain.
  virtual LiftedPoint domain_project(const LiftedPoint& p) const = 0;

  virtual std::string descriptor() const = 0;

  /// Base-space dimension the gauge is bound to, or -1 when it works in any
  /// dimension (norm gauges).
  virtual int base_dim() const { return -1; }
};

using GaugePtr = std::shared_ptr<const Gauge>;

/// weight * ||.||_kind on the lifted space. Full domain.
GaugePtr make_norm_gauge(NormKind kind, double weight);

/// Description of a fundamental set D (a closed convex set containing the
/// origin, to be read as the unit sublevel set of its Minkowski gauge).
struct FundamentalSetDescriptor {
  ConvexSetPtr set;
  int lifted_dim = 2;
  bool bounded = false;
  /// Largest height attained in D, when known a priori.
  std::optional<double> scaling_hint;
  /// Optional projector onto cl cone D; without it the domain projection
  /// falls back to a one-dimensional search over scaled copies of D.
  ConvexSetPtr cone;
};

/// Minkowski gauge of a fundamental set: eval by bisection on the membership
/// of p/mu in D, sublevel projection by scaling the set projection.
GaugePtr make_minkowski_gauge(FundamentalSetDescriptor descriptor,
                              ProjectionSettings settings);

/// g + indicator of C: finite (= g) on C, +infinity outside. Sublevel sets are
/// projected with Dykstra over {sublevel of g, C}.
GaugePtr make_gauge_plus_indicator(GaugePtr g, ConvexSetPtr C,
                                   ProjectionSettings settings);

/// Closed perspective transform of a convex function: (x, h) -> h f(x/h) for
/// h > 0, the recession function at h = 0, +infinity below. Sublevel and
/// domain projections use subgradient halfspace relaxations; supporting cuts
/// of the unit sublevel set are pooled across calls (positive homogeneity
/// makes one pool serve every level).
GaugePtr make_perspective_gauge(ConvexFunctionSpec f, ProjectionSettings settings);

/// alpha * g with sublevel projections delegated to g at level r/alpha.
GaugePtr rescale_gauge(GaugePtr g, double alpha);

/// Adapt a gauge sublevel set {g <= r} to the ConvexSet interface.
ConvexSetPtr make_sublevel_set(GaugePtr g, double r, double membership_tol = 1e-8);

}  // namespace polarprox
