#include "polarprox/polar.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "polarprox/errors.hpp"

namespace polarprox {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

std::string prox_case_name(ProxCase c) {
  switch (c) {
    case ProxCase::AlreadyZero: return "AlreadyZero";
    case ProxCase::DomainProjection: return "DomainProjection";
    case ProxCase::LevelSetBalance: return "LevelSetBalance";
  }
  return "?";
}

double radius_gap(const Gauge& g, double alpha, const LiftedPoint& x, double r) {
  if (r < 0.0) throw std::invalid_argument("radius_gap: negative radius");
  const LiftedPoint u = g.sublevel_project(r, x);
  return distance(x, u) - alpha * r;
}

PolarProxResult polar_prox(const Gauge& g, double alpha, const LiftedPoint& x,
                           const PolarOptions& options) {
  if (alpha <= 0.0) throw std::invalid_argument("polar_prox: alpha must be positive");
  if (!x.all_finite()) throw std::invalid_argument("polar_prox: non-finite input point");

  // Work at alpha = 1 against the scaled gauge alpha*kappa; prox points agree
  // and the scaled envelope is alpha times the requested one.
  auto keval = [&](const LiftedPoint& p) { return alpha * g.eval(p); };
  auto ksub = [&](double r, const LiftedPoint& p) {
    return g.sublevel_project(r / alpha, p);
  };

  PolarProxResult out;
  const double scale = std::max(1.0, norm(x));
  const double v0 = keval(x);

  if (v0 <= options.zero_tolerance * scale) {
    out.prox_point = x;
    out.envelope_value = 0.0;
    out.radius = 0.0;
    out.case_tag = ProxCase::AlreadyZero;
    return out;
  }

  // Candidate from the domain closure.
  const LiftedPoint u_dom = g.domain_project(x);
  const double kdom = keval(u_dom);
  const double obj_dom =
      std::isfinite(kdom) ? std::max(kdom, distance(x, u_dom)) : kInf;

  // Candidate from the radius equation h(r) = dist(x, lev_r) - r = 0.
  bool have_level = false;
  LiftedPoint u_lev;
  double obj_lev = kInf, r_star = 0.0, gap_at_star = 0.0;
  int iters = 0;

  double hi = std::isfinite(v0) ? std::max(1.0, v0) : std::max(1.0, scale);
  LiftedPoint u_hi;
  double h_hi = 0.0;
  auto eval_gap = [&](double r, LiftedPoint& u) {
    u = ksub(r, x);
    ++iters;
    return distance(x, u) - r;
  };

  h_hi = eval_gap(hi, u_hi);
  int growth = 0;
  while (h_hi > 0.0 && growth < options.max_bracket_growth) {
    hi *= 2.0;
    ++growth;
    h_hi = eval_gap(hi, u_hi);
  }

  if (h_hi <= 0.0) {
    // bracket (lo, hi] with h(lo+) > 0; safeguarded secant toward the root
    double lo = 0.0, h_lo = v0;  // h(0+) >= kappa-scaled distance, sign is what matters
    if (!std::isfinite(h_lo)) h_lo = std::max(1.0, scale);
    double r = hi;
    LiftedPoint u = u_hi;
    int last_side = 0;  // Illinois weighting against one-sided stalls
    while (hi - lo > options.radius_tolerance &&
           iters < options.max_bisection_iters) {
      double mid;
      const double denom = h_hi - h_lo;
      if (lo > 0.0 && std::abs(denom) > 1e-300) {
        mid = hi - h_hi * (hi - lo) / denom;
        const double margin = 1e-3 * (hi - lo);
        if (!(mid > lo + margin && mid < hi - margin)) mid = 0.5 * (lo + hi);
      } else {
        mid = 0.5 * (lo + hi);
      }
      const double h = eval_gap(mid, u);
      if (h > 0.0) {
        lo = mid;
        h_lo = h;
        if (last_side == 1) h_hi *= 0.5;
        last_side = 1;
      } else {
        hi = mid;
        h_hi = h;
        r = mid;
        u_hi = u;
        if (last_side == -1) h_lo *= 0.5;
        last_side = -1;
      }
    }
    r_star = r;
    u_lev = u_hi;  // feasible-side projection
    gap_at_star = std::abs(distance(x, u_lev) - r_star);
    const double klev = keval(u_lev);
    obj_lev = std::isfinite(klev) ? std::max(klev, distance(x, u_lev)) : kInf;
    have_level = std::isfinite(obj_lev);
  }

  if (!have_level && !std::isfinite(obj_dom)) {
    std::ostringstream os;
    os << "polar_prox: no candidate found for " << g.descriptor()
       << " (bracket growth " << growth << ", gap at hi " << h_hi << ")";
    throw BisectionFailureError(os.str());
  }

  const bool pick_level =
      have_level && (obj_lev <= obj_dom + options.tie_tolerance * scale);
  const LiftedPoint& u = pick_level ? u_lev : u_dom;
  const double obj = pick_level ? obj_lev : obj_dom;

  out.prox_point = u;
  out.envelope_value = obj / alpha;
  out.bisection_iters = iters;
  out.residual = pick_level ? gap_at_star : 0.0;

  const double ku = g.eval(u);  // original gauge units
  const double du = distance(x, u) / alpha;
  out.radius = std::isfinite(ku) ? ku : 0.0;
  if (out.envelope_value <= options.zero_tolerance * scale) {
    out.case_tag = ProxCase::AlreadyZero;
  } else if (std::isfinite(ku) &&
             std::abs(ku - du) <= 1e-6 * (1.0 + out.envelope_value)) {
    out.case_tag = ProxCase::LevelSetBalance;
    out.radius = pick_level ? r_star / alpha : ku;
  } else {
    out.case_tag = ProxCase::DomainProjection;
  }
  return out;
}

double polar_envelope(const Gauge& g, double alpha, const LiftedPoint& x,
                      const PolarOptions& options) {
  return polar_prox(g, alpha, x, options).envelope_value;
}

}  // namespace polarprox
