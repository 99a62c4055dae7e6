#include "polarprox/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "polarprox/errors.hpp"

namespace polarprox {

namespace {
constexpr double kFixedPointTol = 1e-7;
}

std::string verdict_name(Verdict v) {
  switch (v) {
    case Verdict::Holds: return "Holds";
    case Verdict::Violated: return "Violated";
    case Verdict::Inconclusive: return "Inconclusive";
  }
  return "?";
}

std::string lambda_prime_kind_name(LambdaPrimeResult::Kind k) {
  switch (k) {
    case LambdaPrimeResult::Kind::Finite: return "Finite";
    case LambdaPrimeResult::Kind::Unbounded: return "Unbounded";
    case LambdaPrimeResult::Kind::Inconclusive: return "Inconclusive";
  }
  return "?";
}

double composite_fixed_point_residual(const Gauge& g, double alpha,
                                      const LiftedPoint& p) {
  const LiftedPoint shadow = polar_prox(g, alpha, p).prox_point;
  return distance(project_S(shadow), p);
}

namespace {

void require_fixed(const Gauge& g, double alpha, const LiftedPoint& p,
                   const char* who) {
  if (p.height != 1.0)
    throw InvalidFixedPointError(std::string(who) + ": fixed point must sit on the slice");
  const double res = composite_fixed_point_residual(g, alpha, p);
  if (res > kFixedPointTol) {
    std::ostringstream os;
    os << who << ": point fails fixed-point re-verification (residual " << res << ")";
    throw InvalidFixedPointError(os.str());
  }
}

}  // namespace

PropertyReport audit_T_fqne(const Gauge& g, const std::vector<LiftedPoint>& zero_points,
                            const std::vector<LiftedPoint>& probes, double alpha,
                            double slack) {
  PropertyReport report;
  report.property_name = "prox-map-fqne";
  report.slack = slack;

  for (const auto& z : zero_points) {
    const double v = g.eval(z);
    if (!(v <= 1e-9 * (1.0 + norm(z)))) {
      std::ostringstream os;
      os << "audit_T_fqne: supplied zero point has gauge value " << v;
      throw InvalidFixedPointError(os.str());
    }
  }

  for (const auto& y : probes) {
    const LiftedPoint ty = polar_prox(g, alpha, y).prox_point;
    for (const auto& x : zero_points) {
      const double lhs = squared_norm(ty - x) + squared_norm(ty - y);
      const double rhs = squared_norm(y - x);
      const double violation = lhs - rhs;
      ++report.samples_tested;
      if (violation > report.worst_violation) {
        report.worst_violation = violation;
        report.witnesses.assign(1, Witness{y, violation, -1, "probe"});
      }
    }
  }
  if (report.worst_violation <= slack) report.witnesses.clear();
  report.finish();
  return report;
}

double e_gap(const Gauge& g, double alpha, const LiftedPoint& x,
             const LiftedPoint& y) {
  require_fixed(g, alpha, x, "e_gap");
  if (y.height != 1.0)
    throw std::invalid_argument("e_gap: probe must sit on the slice");
  const LiftedPoint tx = polar_prox(g, alpha, x).prox_point;
  const LiftedPoint ty = polar_prox(g, alpha, y).prox_point;
  return squared_norm(ty - y) - squared_norm(tx - x);
}

PropertyReport audit_composite_contraction(const Gauge& g,
                                           const LiftedPoint& fixed_point,
                                           const std::vector<LiftedPoint>& probes,
                                           double alpha, double slack) {
  PropertyReport report;
  report.property_name = "composite-contraction";
  report.slack = slack;
  require_fixed(g, alpha, fixed_point, "audit_composite_contraction");

  const LiftedPoint tx = polar_prox(g, alpha, fixed_point).prox_point;
  const double tx_res_sq = squared_norm(tx - fixed_point);

  for (const auto& y : probes) {
    const LiftedPoint ty = polar_prox(g, alpha, y).prox_point;
    const double e = squared_norm(ty - y) - tx_res_sq;
    const LiftedPoint next = project_S(ty);
    const double lhs = squared_norm(next - fixed_point);
    const double rhs = squared_norm(y - fixed_point) - e;
    const double violation = std::max(lhs - rhs, -e);  // also guards E >= 0
    ++report.samples_tested;
    if (violation > report.worst_violation) {
      report.worst_violation = violation;
      report.witnesses.assign(1, Witness{y, violation, -1, "probe"});
    }
  }
  if (report.worst_violation <= slack) report.witnesses.clear();
  report.finish();
  return report;
}

PropertyReport audit_fejer(const SolverTrace& trace, const LiftedPoint& reference,
                           double slack) {
  PropertyReport report;
  report.property_name = "fejer-monotonicity";
  report.slack = slack;
  std::vector<LiftedPoint> pts = trace.iterates;
  pts.push_back(trace.final_point);
  for (size_t n = 0; n + 1 < pts.size(); ++n) {
    const double before = distance(pts[n], reference);
    const double after = distance(pts[n + 1], reference);
    const double violation = after - before;
    ++report.samples_tested;
    if (violation > report.worst_violation) {
      report.worst_violation = violation;
      report.witnesses.assign(1, Witness{pts[n + 1], violation,
                                         static_cast<int>(n + 1),
                                         "distance increased at this index"});
    }
  }
  if (report.worst_violation <= slack) report.witnesses.clear();
  report.finish();
  return report;
}

namespace {

enum class SliceVerdict { Feasible, Infeasible, Undecided };

// Nonemptiness of D intersected with the horizontal slice at `height`,
// decided by alternating projections with a stagnation test on the gap.
SliceVerdict slice_feasible(const ConvexSet& D, int base_dim, double height,
                            double feas_tol, int budget, LiftedPoint* warm) {
  LiftedPoint a = (warm && warm->dim() == base_dim) ? *warm
                                                    : LiftedPoint::zero(base_dim);
  double prev_window_gap = std::numeric_limits<double>::infinity();
  double last_decrease = std::numeric_limits<double>::infinity();
  double gap = std::numeric_limits<double>::infinity();
  const int window = 200;
  for (int k = 0; k < budget; ++k) {
    a.height = height;        // slice projection
    a = D.project(a);         // back to D
    gap = std::abs(a.height - height);
    if (gap <= feas_tol) {
      if (warm) *warm = a;
      return SliceVerdict::Feasible;
    }
    if (k % window == window - 1) {
      last_decrease = prev_window_gap - gap;
      if (last_decrease < std::max(1e-12, 1e-7 * gap) && gap > 10.0 * feas_tol)
        return SliceVerdict::Infeasible;
      prev_window_gap = gap;
    }
  }
  // still decreasing at budget's end: treat as feasible-leaning, which keeps
  // unbounded sets marching upward instead of stalling
  if (last_decrease > std::max(1e-9, 1e-6 * gap)) {
    if (warm) *warm = a;
    return SliceVerdict::Feasible;
  }
  return SliceVerdict::Undecided;
}

}  // namespace

LambdaPrimeResult estimate_lambda_prime(const FundamentalSetDescriptor& D,
                                        const ProjectionSettings& settings) {
  LambdaPrimeResult out;
  const int base_dim = D.lifted_dim - 1;
  const double feas_tol = std::max(1e-7, settings.tolerance);
  const int budget = std::min(settings.max_inner_iterations, 60000);

  LiftedPoint warm = LiftedPoint::zero(base_dim);
  int undecided = 0;
  auto probe = [&](double h) {
    ++out.feasibility_queries;
    const SliceVerdict v =
        slice_feasible(*D.set, base_dim, h, feas_tol, budget, &warm);
    if (v == SliceVerdict::Undecided) ++undecided;
    return v;
  };

  // The origin belongs to every fundamental set, so height 0 is feasible.
  double lo = 0.0;
  double hi = D.scaling_hint ? std::max(1.0, 2.0 * *D.scaling_hint) : 1.0;
  while (true) {
    const SliceVerdict v = probe(hi);
    if (v == SliceVerdict::Infeasible) break;
    if (v == SliceVerdict::Undecided) {
      out.kind = LambdaPrimeResult::Kind::Inconclusive;
      out.value = lo;
      return out;
    }
    lo = hi;
    hi *= 2.0;
    if (lo > 1e6) {
      out.kind = LambdaPrimeResult::Kind::Unbounded;
      out.value = lo;
      return out;
    }
  }

  const double resolution = 1e-6 * std::max(1.0, hi);
  while (hi - lo > resolution) {
    const double mid = 0.5 * (lo + hi);
    switch (probe(mid)) {
      case SliceVerdict::Feasible: lo = mid; break;
      case SliceVerdict::Infeasible: hi = mid; break;
      case SliceVerdict::Undecided:
        // resolve conservatively toward the certified-feasible side
        hi = mid;
        break;
    }
    if (undecided > 6) {
      out.kind = LambdaPrimeResult::Kind::Inconclusive;
      out.value = lo;
      return out;
    }
  }
  out.kind = LambdaPrimeResult::Kind::Finite;
  out.value = 0.5 * (lo + hi);
  return out;
}

double FacialReport::worst_error() const {
  double worst = 0.0;
  for (const auto& [k, v] : consistency_errors) worst = std::max(worst, v);
  return worst;
}

FacialReport verify_facial_characterization(const ConvexFunctionSpec& f,
                                            const SolverTrace& trace,
                                            const ProjectionSettings& settings) {
  if (!f.known_min)
    throw MissingGroundTruthError("verify_facial_characterization: function has no known minimum");
  if (trace.status != SolverStatus::Converged)
    throw std::invalid_argument("verify_facial_characterization: trace did not converge");

  const double min_value = f.known_min->first;
  const Vector minimizer = f.known_min->second;
  const GaugePtr gauge = make_perspective_gauge(f, settings);

  FacialReport report;

  if (min_value <= 1e-12) {
    // vanishing-minimum regime: the facial identities degenerate to membership
    // of the limit in the zero set; record that residual instead
    report.lambda_prime = std::numeric_limits<double>::infinity();
    report.theta_prime = 1.0;
    report.r_prime = 0.0;
    report.consistency_errors["zero-set-membership"] =
        gauge->eval(trace.final_point);
    report.consistency_errors["shadow-height-vs-one"] =
        std::abs(trace.final_shadow.height - 1.0);
    return report;
  }

  FundamentalSetDescriptor D;
  D.set = make_sublevel_set(gauge, 1.0, settings.tolerance);
  D.lifted_dim = f.dim + 1;
  D.scaling_hint = 1.0 / min_value;
  const LambdaPrimeResult lp = estimate_lambda_prime(D, settings);

  report.lambda_prime = lp.value;
  report.theta_prime = lp.value / (1.0 + lp.value);
  report.r_prime = 1.0 - report.theta_prime;

  // (i) the top height of the unit sublevel set is the reciprocal minimum
  report.consistency_errors["lambda-prime-vs-reciprocal-min"] =
      lp.kind == LambdaPrimeResult::Kind::Finite
          ? std::abs(lp.value - 1.0 / min_value)
          : std::numeric_limits<double>::infinity();

  // (ii) scaled minimizers sit on the top face of the unit sublevel set
  const double lambda_exact = 1.0 / min_value;
  LiftedPoint face_point{minimizer * lambda_exact, lambda_exact};
  report.face_samples.push_back(face_point);
  report.consistency_errors["face-sample-gauge-vs-one"] =
      std::abs(gauge->eval(face_point) - 1.0);

  // (iii) the rescaled limit minimizes f
  const double lam = lambda_exact;
  const Vector rescaled = ((1.0 + lam) / lam) * trace.final_point.base;
  report.consistency_errors["rescaled-limit-excess"] =
      std::abs(f.value(rescaled) - min_value);

  // (iv) the scaled minimizer is a fixed point of the composite map
  const LiftedPoint candidate{(lam / (1.0 + lam)) * minimizer, 1.0};
  report.consistency_errors["scaled-minimizer-fixed-point-residual"] =
      composite_fixed_point_residual(*gauge, 1.0, candidate);

  // prox height at the limit matches theta'
  report.consistency_errors["shadow-height-vs-theta-prime"] =
      std::abs(trace.final_shadow.height - lam / (1.0 + lam));
  return report;
}

PropertyReport search_fqne_violation(const Gauge& g, const LiftedPoint& fixed_point,
                                     int probe_budget,
                                     const FqneSearchOptions& options) {
  PropertyReport report;
  report.property_name = "composite-cutter-violation-search";
  report.slack = options.report_threshold;
  require_fixed(g, options.alpha, fixed_point, "search_fqne_violation");

  const int d = fixed_point.dim();
  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unif(-options.box_halfwidth,
                                              options.box_halfwidth);

  auto score = [&](const LiftedPoint& y) {
    const LiftedPoint image = project_S(polar_prox(g, options.alpha, y).prox_point);
    return dot(fixed_point - image, y - image);
  };

  LiftedPoint best = fixed_point;
  double best_score = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < probe_budget; ++k) {
    LiftedPoint y{Vector(d), 1.0};
    for (int i = 0; i < d; ++i) y.base(i) = unif(rng);
    const double s = score(y);
    ++report.samples_tested;
    if (s > best_score) {
      best_score = s;
      best = y;
    }
  }

  // local refinement: coordinate ascent with a shrinking step
  double step = options.box_halfwidth / 4.0;
  for (int it = 0; it < options.ascent_steps; ++it) {
    bool improved = false;
    for (int i = 0; i < d; ++i) {
      for (const double dir : {+1.0, -1.0}) {
        LiftedPoint y = best;
        y.base(i) += dir * step;
        const double s = score(y);
        ++report.samples_tested;
        if (s > best_score) {
          best_score = s;
          best = y;
          improved = true;
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  report.worst_violation = std::max(best_score, 0.0);
  if (best_score > options.report_threshold) {
    Witness w;
    w.point = best;
    w.violation = best_score;

    // necessary-condition record at the witness
    const auto prox_fixed = polar_prox(g, options.alpha, fixed_point);
    const auto prox_witness = polar_prox(g, options.alpha, best);
    const double lambda = prox_fixed.prox_point.height;
    const double mu = prox_witness.prox_point.height;
    std::ostringstream os;
    os << "lambda=" << lambda << " mu=" << mu
       << " ordered=" << ((lambda < mu && mu < 1.0) ? "yes" : "no")
       << " fixed-point-case=" << prox_case_name(prox_fixed.case_tag);
    w.note = os.str();
    report.witnesses.push_back(w);
    report.verdict = Verdict::Violated;
  } else {
    // absence of a witness is evidence, not a certificate
    report.verdict = Verdict::Holds;
    report.note = "no violation found within the probe budget";
  }
  return report;
}

PropertyReport check_shadow_limit(const SolverTrace& trace, double slack) {
  PropertyReport report;
  report.property_name = "shadow-height-limit";
  report.slack = slack;
  if (trace.shadows.empty()) {
    report.verdict = Verdict::Inconclusive;
    report.note = "trace has no shadows";
    return report;
  }
  const double height = trace.final_shadow.height;
  const double residual = trace.final_residual;
  report.worst_violation = std::abs(height - (1.0 - residual));
  report.samples_tested = 1;

  // tail heights should settle monotonically within noise
  const size_t tail = std::min<size_t>(trace.shadows.size(), 50);
  double drift = 0.0;
  const size_t start = trace.shadows.size() - tail;
  const double direction =
      trace.shadows.back().height - trace.shadows[start].height;
  for (size_t n = start; n + 1 < trace.shadows.size(); ++n) {
    const double step = trace.shadows[n + 1].height - trace.shadows[n].height;
    if (direction >= 0.0)
      drift = std::max(drift, -step);
    else
      drift = std::max(drift, step);
  }
  if (drift > 1e-6) {
    report.note = "tail heights not monotone within noise";
    report.worst_violation = std::max(report.worst_violation, drift);
  }
  report.finish();
  return report;
}

}  // namespace polarprox
