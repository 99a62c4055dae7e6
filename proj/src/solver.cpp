#include "polarprox/solver.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "polarprox/errors.hpp"

namespace polarprox {

std::string solver_status_name(SolverStatus s) {
  switch (s) {
    case SolverStatus::Converged: return "Converged";
    case SolverStatus::MaxIterations: return "MaxIterations";
    case SolverStatus::Diverged: return "Diverged";
    case SolverStatus::Error: return "Error";
  }
  return "?";
}

namespace {

void require_on_slice(const LiftedPoint& y, const char* who) {
  if (y.height != 1.0)
    throw std::invalid_argument(std::string(who) + ": point must have height 1");
}

}  // namespace

std::pair<LiftedPoint, LiftedPoint> gp4a_step(const Gauge& g, double alpha,
                                              const LiftedPoint& y,
                                              const PolarOptions& options) {
  require_on_slice(y, "gp4a_step");
  const LiftedPoint shadow = polar_prox(g, alpha, y, options).prox_point;
  return {project_S(shadow), shadow};
}

std::pair<LiftedPoint, LiftedPoint> relaxed_step(const Gauge& g,
                                                 const SolverConfig& cfg,
                                                 const LiftedPoint& y) {
  require_on_slice(y, "relaxed_step");
  if (cfg.gamma < 0.0 || cfg.gamma >= 1.0)
    throw std::invalid_argument("relaxed_step: gamma must lie in [0, 1)");
  auto [next, shadow] = gp4a_step(g, cfg.alpha, y, cfg.polar);
  if (cfg.gamma > 0.0) {
    next.base = (1.0 - cfg.gamma) * next.base + cfg.gamma * y.base;
    next.height = 1.0;
  }
  return {next, shadow};
}

SolverTrace run_gp4a(const Gauge& g, const SolverConfig& cfg,
                     const LiftedPoint& y0) {
  require_on_slice(y0, "run_gp4a");
  if (cfg.max_iterations < 1)
    throw std::invalid_argument("run_gp4a: max_iterations must be >= 1");
  if (!y0.all_finite()) throw std::invalid_argument("run_gp4a: non-finite start");

  SolverTrace trace;
  const int stride = std::max(1, cfg.trace_stride);

  LiftedPoint y = y0;
  double best_residual = std::numeric_limits<double>::infinity();
  int since_improvement = 0;
  int last_recorded = -1;

  auto record = [&](int n, const LiftedPoint& yn, const LiftedPoint& shadow) {
    if (n == last_recorded) return;
    trace.step_index.push_back(n);
    trace.iterates.push_back(yn);
    trace.shadows.push_back(shadow);
    last_recorded = n;
  };

  trace.final_point = y0;
  for (int n = 0; n < cfg.max_iterations; ++n) {
    LiftedPoint next, shadow;
    try {
      std::tie(next, shadow) = relaxed_step(g, cfg, y);
    } catch (const std::exception& e) {
      trace.status = SolverStatus::Error;
      trace.error_message = e.what();
      trace.error_iteration = n;
      trace.final_point = y;
      trace.steps = n;
      return trace;
    }
    const double residual = distance(shadow, y);
    const double displacement = distance(next, y);

    trace.residuals.push_back(residual);
    if (n % stride == 0) record(n, y, shadow);
    trace.final_point = next;
    trace.final_shadow = shadow;
    trace.final_residual = residual;
    trace.steps = n + 1;

    const bool converged = displacement < cfg.fixed_point_tolerance;
    const bool diverged = norm(next) > cfg.divergence_guard;

    // residual stagnation: no progress over a long window while the iterates
    // keep moving above tolerance
    bool stagnant = false;
    if (residual < best_residual - 1e-12) {
      best_residual = residual;
      since_improvement = 0;
    } else if (++since_improvement >= 1000 && !converged) {
      stagnant = true;
    }

    if (converged || diverged || stagnant || n + 1 == cfg.max_iterations) {
      record(n, y, shadow);
      trace.status = converged  ? SolverStatus::Converged
                     : diverged ? SolverStatus::Diverged
                     : stagnant ? SolverStatus::Diverged
                                : SolverStatus::MaxIterations;
      return trace;
    }
    y = next;
  }
  trace.status = SolverStatus::MaxIterations;
  return trace;
}

P4aResult run_p4a(const ConvexFunctionSpec& f, double alpha, const Vector& v0,
                  const SolverConfig& cfg) {
  ProjectionSettings settings;
  settings.tolerance = std::min(1e-9, cfg.polar.radius_tolerance);
  const GaugePtr gauge = make_perspective_gauge(f, settings);

  SolverConfig run_cfg = cfg;
  run_cfg.alpha = alpha;

  P4aResult result;
  result.trace = run_gp4a(*gauge, run_cfg, LiftedPoint::lift(v0));
  result.shadow_height = result.trace.final_shadow.height;

  const Vector& base = result.trace.final_point.base;
  if (result.shadow_height > 1e-6)
    result.minimizer_estimate = base / result.shadow_height;
  else
    result.minimizer_estimate = base;
  return result;
}

}  // namespace polarprox
