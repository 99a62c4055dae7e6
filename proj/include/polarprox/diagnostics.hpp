#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "polarprox/functions.hpp"
#include "polarprox/gauges.hpp"
#include "polarprox/solver.hpp"

namespace polarprox {

enum class Verdict { Holds, Violated, Inconclusive };

std::string verdict_name(Verdict v);

struct Witness {
  LiftedPoint point;
  double violation = 0.0;
  int index = -1;
  std::string note;
};

/// Outcome of one sampled property audit. verdict == Holds exactly when the
/// worst violation stays within the declared slack.
struct PropertyReport {
  std::string property_name;
  int samples_tested = 0;
  double worst_violation = 0.0;
  double slack = 0.0;
  std::vector<Witness> witnesses;
  Verdict verdict = Verdict::Inconclusive;
  std::string note;

  void finish() {
    verdict = worst_violation <= slack ? Verdict::Holds : Verdict::Violated;
  }
};

/// Checks the firm quasinonexpansivity of the prox map itself:
/// ||Ty - x||^2 + ||Ty - y||^2 <= ||y - x||^2 + slack for gauge zeros x.
/// Throws InvalidFixedPointError when a supplied zero point fails eval <= tol.
PropertyReport audit_T_fqne(const Gauge& g, const std::vector<LiftedPoint>& zero_points,
                            const std::vector<LiftedPoint>& probes,
                            double alpha = 1.0, double slack = 1e-6);

/// Contraction of the composite map against a verified fixed point:
/// ||P_S T y - x||^2 <= ||y - x||^2 - E(x, y) + slack.
PropertyReport audit_composite_contraction(const Gauge& g,
                                           const LiftedPoint& fixed_point,
                                           const std::vector<LiftedPoint>& probes,
                                           double alpha = 1.0,
                                           double slack = 1e-6);

/// E(x, y) = ||Ty - y||^2 - ||Tx - x||^2 for a verified fixed point x of the
/// composite map and y on the slice. Nonnegative, zero exactly on fixed points.
double e_gap(const Gauge& g, double alpha, const LiftedPoint& x,
             const LiftedPoint& y);

/// Per-step monotonicity of distances to a reference point along a trace.
PropertyReport audit_fejer(const SolverTrace& trace, const LiftedPoint& reference,
                           double slack = 1e-9);

struct LambdaPrimeResult {
  enum class Kind { Finite, Unbounded, Inconclusive };
  Kind kind = Kind::Inconclusive;
  double value = 0.0;
  int feasibility_queries = 0;
};

std::string lambda_prime_kind_name(LambdaPrimeResult::Kind k);

/// Largest height attained in the fundamental set, found by bisection on the
/// nonemptiness of horizontal slices; each slice is decided by alternating
/// projections with a stagnation test on the gap. Returns Unbounded when
/// feasibility persists past height 1e6.
LambdaPrimeResult estimate_lambda_prime(const FundamentalSetDescriptor& D,
                                        const ProjectionSettings& settings);

/// Consistency record for the facial description of the fixed-point set of a
/// perspective-gauge run: lambda_prime = 1/min f, prox heights at fixed points
/// equal theta' = lambda'/(1+lambda'), scaled minimizers are fixed points, and
/// the rescaled limit minimizes f.
struct FacialReport {
  double lambda_prime = 0.0;
  double theta_prime = 0.0;  // lambda'/(1+lambda'), exact in lambda_prime
  double r_prime = 0.0;      // 1 - theta_prime
  std::vector<LiftedPoint> face_samples;
  std::map<std::string, double> consistency_errors;

  double worst_error() const;
};

/// Requires f.known_min (throws MissingGroundTruthError otherwise) and a
/// converged trace of the corresponding perspective-gauge run.
FacialReport verify_facial_characterization(const ConvexFunctionSpec& f,
                                            const SolverTrace& trace,
                                            const ProjectionSettings& settings = {});

struct FqneSearchOptions {
  double box_halfwidth = 3.0;
  std::uint64_t seed = 20240913;
  double alpha = 1.0;
  int ascent_steps = 50;
  double report_threshold = 1e-8;
};

/// Random + coordinate-ascent search for probes where the composite map fails
/// the cutter inequality against the given fixed point. A Violated verdict
/// certifies the failure (with the witness); Holds only means the search found
/// nothing within its budget. Witness notes record whether the necessary
/// conditions (shadow heights lambda < mu < 1, level-set prox at the fixed
/// point) hold at the witness.
PropertyReport search_fqne_violation(const Gauge& g, const LiftedPoint& fixed_point,
                                     int probe_budget,
                                     const FqneSearchOptions& options = {});

/// Verifies that the last shadow height matches 1 - (last residual) and that
/// the shadow heights settle monotonically within noise.
PropertyReport check_shadow_limit(const SolverTrace& trace, double slack = 1e-4);

/// ||P_S(T p) - p||, the fixed-point residual of the composite map at p.
double composite_fixed_point_residual(const Gauge& g, double alpha,
                                      const LiftedPoint& p);

}  // namespace polarprox
