#include "polarprox/projections.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <limits>
#include <sstream>

#include "polarprox/errors.hpp"

namespace polarprox {

namespace {

void check_settings(const ProjectionSettings& s, const char* who) {
  if (s.tolerance <= 0.0)
    throw std::invalid_argument(std::string(who) + ": tolerance must be positive");
  if (s.max_inner_iterations < 1)
    throw std::invalid_argument(std::string(who) + ": max_inner_iterations must be >= 1");
}

}  // namespace

LiftedPoint project_intersection_dykstra(const std::vector<ConvexSetPtr>& sets,
                                         const LiftedPoint& p,
                                         const ProjectionSettings& settings) {
  check_settings(settings, "dykstra");
  if (sets.empty()) throw std::invalid_argument("dykstra: empty set list");
  if (sets.size() == 1) return sets[0]->project(p);

  const size_t m = sets.size();
  LiftedPoint x = p;
  std::vector<LiftedPoint> corrections(m, LiftedPoint::zero(p.dim()));

  const double tol = settings.tolerance;
  LiftedPoint prev_cycle = x;
  for (int cycle = 0; cycle < settings.max_inner_iterations; ++cycle) {
    // correction increments must vanish too: the iterate alone can revisit a
    // feasible point long before the corrections settle
    double correction_shift = 0.0;
    for (size_t i = 0; i < m; ++i) {
      const LiftedPoint y = x + corrections[i];
      const LiftedPoint z = sets[i]->project(y);
      correction_shift += squared_norm((y - z) - corrections[i]);
      corrections[i] = y - z;
      x = z;
    }
    const double moved = distance(x, prev_cycle);
    if (moved < tol && std::sqrt(correction_shift) < tol) {
      bool all_in = true;
      for (const auto& s : sets)
        if (!s->contains(x, tol)) { all_in = false; break; }
      if (all_in) return x;
    }
    prev_cycle = x;
  }
  std::ostringstream os;
  os << "dykstra: corrections failed to stabilize after "
     << settings.max_inner_iterations
     << " cycles (intersection may be empty or degenerate)";
  throw NonConvergenceError(os.str());
}

namespace detail {

Vector project_onto_halfspaces(const std::vector<Vector>& rows,
                               const std::vector<double>& rhs, const Vector& p,
                               bool* infeasible_hint) {
  if (infeasible_hint) *infeasible_hint = false;
  const int m = static_cast<int>(rows.size());
  if (m == 0) return p;

  // Dual of min ||q - p||^2 s.t. A q <= b is a bound-constrained least-squares
  // problem in the multipliers; solve it with a Lawson-Hanson style active set.
  std::vector<double> lambda(m, 0.0);
  std::vector<int> passive;
  passive.reserve(16);

  auto current_point = [&]() {
    Vector q = p;
    for (int i : passive) q -= lambda[i] * rows[i];
    return q;
  };

  const double scale = std::max(1.0, p.norm());
  const double entry_tol = 1e-12 * scale;
  Vector q = p;

  const int max_outer = 6 * m + 40;
  for (int outer = 0; outer < max_outer; ++outer) {
    // entering constraint: most violated at the current point
    int enter = -1;
    double worst = entry_tol;
    for (int i = 0; i < m; ++i) {
      if (lambda[i] > 0.0) continue;
      const double v = rows[i].dot(q) - rhs[i];
      if (v > worst) { worst = v; enter = i; }
    }
    if (enter < 0) return q;
    passive.push_back(enter);

    // re-solve on the passive set until multipliers stay nonnegative
    for (int inner = 0; inner <= m + 2; ++inner) {
      const int k = static_cast<int>(passive.size());
      Eigen::MatrixXd G(k, k);
      Eigen::VectorXd c(k);
      for (int a = 0; a < k; ++a) {
        c(a) = rows[passive[a]].dot(p) - rhs[passive[a]];
        for (int b = 0; b <= a; ++b) {
          G(a, b) = rows[passive[a]].dot(rows[passive[b]]);
          G(b, a) = G(a, b);
        }
      }
      const double ridge = 1e-13 * (G.trace() / std::max(1, k) + 1.0);
      G.diagonal().array() += ridge;
      Eigen::VectorXd z = G.ldlt().solve(c);

      if ((z.array() >= -1e-14).all()) {
        for (int a = 0; a < k; ++a) lambda[passive[a]] = std::max(0.0, z(a));
        break;
      }
      // step toward z until the first multiplier hits zero, then drop it
      double alpha = 1.0;
      for (int a = 0; a < k; ++a) {
        if (z(a) < 0.0) {
          const double la = lambda[passive[a]];
          const double step = la / (la - z(a));
          alpha = std::min(alpha, step);
        }
      }
      for (int a = 0; a < k; ++a) {
        const double la = lambda[passive[a]];
        lambda[passive[a]] = la + alpha * (z(a) - la);
      }
      std::vector<int> kept;
      kept.reserve(passive.size());
      for (int idx : passive) {
        if (lambda[idx] > 1e-14) kept.push_back(idx);
        else lambda[idx] = 0.0;
      }
      passive.swap(kept);
      if (passive.empty()) break;
    }
    q = current_point();

    if (infeasible_hint) {
      double lsum = 0.0;
      for (int i : passive) lsum += lambda[i];
      if (lsum > 1e14 * scale) { *infeasible_hint = true; return q; }
    }
  }
  return q;
}

}  // namespace detail

LiftedPoint project_sublevel_subgrad(const LiftedFunction& g, double level,
                                     const LiftedPoint& p,
                                     const ProjectionSettings& settings,
                                     const ConvexSet* domain,
                                     const LiftedPoint* feasible_anchor) {
  check_settings(settings, "project_sublevel_subgrad");
  const double feas_tol = settings.tolerance;
  const double scale = std::max(1.0, norm(p));
  if (g.value(p) <= level + feas_tol && (!domain || domain->contains(p, feas_tol)))
    return p;

  const LiftedPoint anchor =
      feasible_anchor ? *feasible_anchor : LiftedPoint::zero(p.dim());

  // Outer model of {g <= level}: subgradient cuts of g plus obtuse-angle
  // separators obtained from domain projections.
  std::vector<Vector> rows;
  std::vector<double> rhs;
  const size_t max_cuts = 192;

  auto push_row = [&](Vector row, double b) {
    const double n = row.norm();
    if (n <= 1e-300) return;
    rows.push_back(row / n);
    rhs.push_back(b / n);
    if (rows.size() > max_cuts) {
      rows.erase(rows.begin());
      rhs.erase(rhs.begin());
    }
  };

  auto add_cut_at = [&](const LiftedPoint& w, double value) {
    const LiftedPoint s = g.subgradient(w);
    const double sn = norm(s);
    if (!s.all_finite()) return false;
    if (sn <= 1e-14) {
      if (value > level + feas_tol)
        throw InfeasibleLevelError(g.name + ": minimum appears to exceed the requested level");
      return false;
    }
    // {u : value + <s, u - w> <= level}
    push_row(flatten(s), level - value + dot(s, w));
    return true;
  };

  // Walk from u toward the anchor until g is finite above the level, cut there.
  auto cut_toward_anchor = [&](const LiftedPoint& u) {
    double lo = 0.0, hi = 1.0;  // t=0 at anchor, t=1 at u
    for (int it = 0; it < 80; ++it) {
      const double mid = 0.5 * (lo + hi);
      const LiftedPoint w = anchor + mid * (u - anchor);
      const double v = g.value(w);
      if (std::isfinite(v)) {
        if (v > level + feas_tol) return add_cut_at(w, v);
        lo = mid;
      } else {
        hi = mid;
      }
    }
    return false;
  };

  // Last resort at points where g jumps to +infinity: probe axis nudges for a
  // finite evaluation point and cut there.
  auto cut_near = [&](const LiftedPoint& u) {
    for (const double eps : {1e-1, 1e-3, 1e-6, 1e-9}) {
      const double step = eps * (1.0 + norm(u));
      for (int i = 0; i < u.dim() + 1; ++i) {
        for (const double dir : {+1.0, -1.0}) {
          Vector v = flatten(u);
          v(i) += dir * step;
          const LiftedPoint w = unflatten(v);
          const double val = g.value(w);
          if (std::isfinite(val) && val > level + feas_tol) return add_cut_at(w, val);
        }
      }
    }
    return false;
  };

  const Vector pf = flatten(p);
  LiftedPoint u = p;
  LiftedPoint prev = p;
  int stalls = 0;

  const int max_outer = std::max(64, settings.max_inner_iterations / 100);
  for (int outer = 0; outer < max_outer; ++outer) {
    bool progressed = false;

    if (domain && !domain->contains(u, feas_tol)) {
      const LiftedPoint w = domain->project(u);
      const double gap = distance(u, w);
      if (gap > 1e-13 * scale) {
        const LiftedPoint d = (1.0 / gap) * (u - w);
        push_row(flatten(d), dot(d, w));
        progressed = true;
      }
      u = w;
    }

    const double v = g.value(u);
    if (v <= level + feas_tol && (!domain || domain->contains(u, feas_tol))) return u;

    if (std::isfinite(v)) {
      progressed = add_cut_at(u, v) || progressed;
    } else {
      progressed = (cut_toward_anchor(u) || cut_near(u)) || progressed;
    }
    if (!progressed && ++stalls > 8)
      throw NonConvergenceError(g.name + ": sublevel projection stalled without usable cuts");

    bool infeasible = false;
    const Vector qf = detail::project_onto_halfspaces(rows, rhs, pf, &infeasible);
    if (infeasible)
      throw InfeasibleLevelError(g.name + ": halfspace relaxations diverged; level set likely empty");
    const LiftedPoint q = unflatten(qf);
    if (distance(q, prev) < 1e-14 * scale && g.value(q) > level + feas_tol) ++stalls;
    prev = u;
    u = q;
  }
  if (g.value(u) <= level + 10.0 * feas_tol && (!domain || domain->contains(u, 10.0 * feas_tol)))
    return u;
  throw NonConvergenceError(g.name + ": sublevel projection did not converge in budget");
}

}  // namespace polarprox
