#pragma once

#include <string>
#include <utility>
#include <vector>

#include "polarprox/functions.hpp"
#include "polarprox/gauges.hpp"
#include "polarprox/polar.hpp"

namespace polarprox {

struct SolverConfig {
  double alpha = 1.0;
  /// Under-relaxation in [0, 1); 0 is the plain projected iteration.
  double gamma = 0.0;
  int max_iterations = 100000;
  /// Stop when successive iterates move less than this.
  double fixed_point_tolerance = 1e-8;
  /// Abort when the iterate norm exceeds this.
  double divergence_guard = 1e6;
  /// Record every k-th step in the trace (residuals stay dense; the first and
  /// last steps are always recorded).
  int trace_stride = 1;
  PolarOptions polar;
};

enum class SolverStatus { Converged, MaxIterations, Diverged, Error };

std::string solver_status_name(SolverStatus s);

/// Record of one projected polar proximal run. Row j holds the iterate at
/// step_index[j], its prox image (the shadow), and the residual of that step;
/// iterates live on the slice S (height exactly 1). `residuals` is dense over
/// all steps regardless of the trace stride.
struct SolverTrace {
  std::vector<int> step_index;
  std::vector<LiftedPoint> iterates;
  std::vector<LiftedPoint> shadows;
  std::vector<double> residuals;  // ||T y_n - y_n|| for every step n
  SolverStatus status = SolverStatus::Error;
  LiftedPoint final_point;
  LiftedPoint final_shadow;
  double final_residual = 0.0;
  int steps = 0;
  std::string error_message;
  int error_iteration = -1;
};

/// One plain step: shadow = prox of y, next = slice projection of the shadow.
std::pair<LiftedPoint, LiftedPoint> gp4a_step(const Gauge& g, double alpha,
                                              const LiftedPoint& y,
                                              const PolarOptions& options = {});

/// One relaxed step: next = (1-gamma) * P_S(T y) + gamma * y, height exactly 1.
std::pair<LiftedPoint, LiftedPoint> relaxed_step(const Gauge& g,
                                                 const SolverConfig& cfg,
                                                 const LiftedPoint& y);

/// Iterate from y0 (height must be 1) until the displacement drops below the
/// fixed-point tolerance, the iteration budget runs out, or the iterates blow
/// past the divergence guard. Oracle failures are captured as status Error
/// with the failing iteration index.
SolverTrace run_gp4a(const Gauge& g, const SolverConfig& cfg,
                     const LiftedPoint& y0);

/// Result of minimizing f through the perspective-transform route.
struct P4aResult {
  SolverTrace trace;
  Vector minimizer_estimate;
  double shadow_height = 0.0;
};

/// Build the perspective gauge of f, run from (v0, 1), and read the minimizer
/// back off the limit: divide the final base by the limiting shadow height,
/// except in the vanishing-height regime where the base itself converges to a
/// minimizer.
P4aResult run_p4a(const ConvexFunctionSpec& f, double alpha, const Vector& v0,
                  const SolverConfig& cfg);

}  // namespace polarprox
