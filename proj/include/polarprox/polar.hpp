#pragma once

#include <string>

#include "polarprox/gauges.hpp"
#include "polarprox/lifted_point.hpp"

namespace polarprox {

enum class ProxCase { AlreadyZero, DomainProjection, LevelSetBalance };

std::string prox_case_name(ProxCase c);

/// Output of the polar proximal map at one point.
struct PolarProxResult {
  LiftedPoint prox_point;
  /// Polar envelope value: max(kappa(prox), ||x - prox|| / alpha).
  double envelope_value = 0.0;
  /// Level of the active sublevel set in gauge units; for the balance case
  /// this is the r with kappa(prox) = ||x - prox|| / alpha = r.
  double radius = 0.0;
  ProxCase case_tag = ProxCase::AlreadyZero;
  int bisection_iters = 0;
  /// |dist(x, lev_r) - alpha r| at bisection termination.
  double residual = 0.0;
};

struct PolarOptions {
  double radius_tolerance = 1e-8;
  int max_bisection_iters = 200;
  int max_bracket_growth = 60;
  double zero_tolerance = 1e-10;
  double tie_tolerance = 1e-9;
};

/// The polar proximal map: the minimizer of u -> max(kappa(u), ||x-u||/alpha).
/// Internally reduces to alpha = 1 by scaling the gauge, then compares the
/// two candidates the minimizer can be: the projection onto the level set
/// whose radius balances distance against level (found by bisection on a
/// strictly decreasing gap), and the projection onto the domain closure.
PolarProxResult polar_prox(const Gauge& g, double alpha, const LiftedPoint& x,
                           const PolarOptions& options = {});

/// Envelope value only.
double polar_envelope(const Gauge& g, double alpha, const LiftedPoint& x,
                      const PolarOptions& options = {});

/// Bisection objective: ||x - P_{lev<=r}(x)|| - alpha * r. Nonincreasing
/// distance minus an increasing term, so it crosses zero at most once.
double radius_gap(const Gauge& g, double alpha, const LiftedPoint& x, double r);

}  // namespace polarprox
