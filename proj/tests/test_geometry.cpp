#include <cmath>

#include "doctest.h"
#include "polarprox/convex_sets.hpp"
#include "polarprox/errors.hpp"
#include "polarprox/projections.hpp"
#include "support/oracles.hpp"

using namespace polarprox;
using polarprox::testing::grid_nearest_feasible;
using polarprox::testing::random_lifted;

namespace {

LiftedPoint pt(double x, double h) {
  Vector v(1);
  v << x;
  return {v, h};
}

LiftedPoint pt2(double x0, double x1, double h) {
  Vector v(2);
  v << x0, x1;
  return {v, h};
}

}  // namespace

TEST_CASE("slice projection drops the height to 1 and nothing else") {
  const LiftedPoint p = pt(3.0, 0.2);
  const LiftedPoint q = project_S(p);
  CHECK(q.base(0) == 3.0);
  CHECK(q.height == 1.0);
  const LiftedPoint fixed = project_S(pt(0.0, 1.0));
  CHECK(fixed.base(0) == 0.0);
  CHECK(fixed.height == 1.0);
}

TEST_CASE("slice projection is idempotent and nonexpansive") {
  for (const auto& p : random_lifted(50, 3, 5.0, 21)) {
    const LiftedPoint q = project_S(p);
    CHECK(distance(project_S(q), q) == 0.0);
    for (const auto& r : random_lifted(3, 3, 5.0, 22)) {
      CHECK(distance(project_S(p), project_S(r)) <= distance(p, r) + 1e-15);
    }
  }
}

TEST_CASE("slice projection satisfies the subspace Pythagorean identity") {
  for (const auto& u : random_lifted(100, 2, 4.0, 23)) {
    for (const auto& raw : random_lifted(2, 2, 4.0, 24)) {
      const LiftedPoint v = project_S(raw);  // v on the slice
      const double lhs = squared_norm(u - v);
      const double rhs = squared_norm(project_S(u) - v) + squared_norm(u - project_S(u));
      CHECK(std::abs(lhs - rhs) <= 1e-12 * (1.0 + lhs));
    }
  }
}

TEST_CASE("box projection clamps componentwise") {
  const LiftedPoint lower = pt(-1.0, -1.0), upper = pt(1.0, 1.0);
  CHECK(distance(project_box(lower, upper, pt(2.0, 0.0)), pt(1.0, 0.0)) == 0.0);
  CHECK(distance(project_box(lower, upper, pt(0.3, -0.4)), pt(0.3, -0.4)) == 0.0);

  // tight box around the origin
  const LiftedPoint l2 = pt(-0.05, -0.05), u2 = pt(0.05, 0.05);
  const LiftedPoint q = project_box(l2, u2, pt(1.0, -0.05));
  CHECK(q.base(0) == doctest::Approx(0.05).epsilon(1e-15));
  CHECK(q.height == doctest::Approx(-0.05).epsilon(1e-15));
}

TEST_CASE("box rejects inverted corners") {
  CHECK_THROWS_AS(BoxSet(pt(1.0, 0.0), pt(-1.0, 0.0)), std::invalid_argument);
}

TEST_CASE("halfspace projection has the closed form") {
  // x <= 0
  const LiftedPoint n = pt(1.0, 0.0);
  CHECK(distance(project_halfspace(n, 0.0, pt(1.0, 0.0)), pt(0.0, 0.0)) == 0.0);
  CHECK(distance(project_halfspace(n, 0.0, pt(-0.5, 3.0)), pt(-0.5, 3.0)) == 0.0);

  // {(v,u) : v + u/4 <= 0} from (2, 1): residual 9/4, |n|^2 = 17/16
  const LiftedPoint q = project_halfspace(pt(1.0, 0.25), 0.0, pt(2.0, 1.0));
  CHECK(q.base(0) == doctest::Approx(-2.0 / 17.0).epsilon(1e-14));
  CHECK(q.height == doctest::Approx(8.0 / 17.0).epsilon(1e-14));
}

TEST_CASE("halfspace rejects a zero normal") {
  CHECK_THROWS_AS(HalfspaceSet(pt(0.0, 0.0), 1.0), std::invalid_argument);
}

TEST_CASE("ball projections") {
  const LiftedPoint origin = pt(0.0, 0.0);
  CHECK(distance(project_ball(origin, 1.0, NormKind::L2, pt(2.0, 0.0)), pt(1.0, 0.0)) <=
        1e-15);
  CHECK(distance(project_ball(origin, 1.0, NormKind::L2, pt(0.1, 0.2)), pt(0.1, 0.2)) ==
        0.0);
  const LiftedPoint q1 = project_ball(origin, 1.0, NormKind::L1, pt(1.0, 1.0));
  CHECK(q1.base(0) == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(q1.height == doctest::Approx(0.5).epsilon(1e-14));
  const LiftedPoint qi = project_ball(origin, 1.0, NormKind::Linf, pt(3.0, -4.0));
  CHECK(qi.base(0) == doctest::Approx(1.0));
  CHECK(qi.height == doctest::Approx(-1.0));
  CHECK_THROWS_AS(BallSet(origin, -0.5, NormKind::L2), std::invalid_argument);
}

TEST_CASE("l1 ball projection agrees with a feasible-grid oracle") {
  const LiftedPoint origin = pt2(0.0, 0.0, 0.0);
  const BallSet ball(origin, 1.0, NormKind::L1);
  for (const auto& p : random_lifted(10, 2, 2.0, 31)) {
    const LiftedPoint q = ball.project(p);
    CHECK(lifted_norm(q, NormKind::L1) <= 1.0 + 1e-12);
    const LiftedPoint oracle = grid_nearest_feasible(
        [&](const LiftedPoint& c) { return lifted_norm(c, NormKind::L1) <= 1.0; }, p,
        pt2(-1.1, -1.1, -1.1), pt2(1.1, 1.1, 1.1), 21, 26);
    CHECK(distance(p, q) <= distance(p, oracle) + 1e-6);
  }
}

TEST_CASE("dykstra degenerates to the single-set projection") {
  ProjectionSettings settings;
  auto box = std::make_shared<BoxSet>(pt(-1.0, -1.0), pt(1.0, 1.0));
  const LiftedPoint p = pt(2.5, -3.0);
  CHECK(distance(project_intersection_dykstra({box}, p, settings), box->project(p)) ==
        0.0);
}

TEST_CASE("dykstra returns interior points unchanged") {
  ProjectionSettings settings;
  auto box = std::make_shared<BoxSet>(pt(-1.0, -1.0), pt(1.0, 1.0));
  auto half = std::make_shared<HalfspaceSet>(pt(1.0, 1.0), 0.0);
  const LiftedPoint p = pt(-0.3, 0.1);
  CHECK(distance(project_intersection_dykstra({box, half}, p, settings), p) <= 1e-12);
}

TEST_CASE("dykstra box-halfspace intersection matches the grid oracle") {
  ProjectionSettings settings;
  settings.tolerance = 1e-10;
  auto box = std::make_shared<BoxSet>(pt(-1.0, -1.0), pt(1.0, 1.0));
  auto half = std::make_shared<HalfspaceSet>(pt(1.0, 1.0), 0.0);

  const LiftedPoint p = pt(1.0, 1.0);
  const LiftedPoint q = project_intersection_dykstra({box, half}, p, settings);
  // nearest feasible point of the wedge is the origin
  CHECK(distance(q, pt(0.0, 0.0)) <= 1e-8);

  for (const auto& probe : random_lifted(8, 1, 2.0, 41)) {
    const LiftedPoint qq = project_intersection_dykstra({box, half}, probe, settings);
    const LiftedPoint oracle = grid_nearest_feasible(
        [&](const LiftedPoint& c) {
          return box->contains(c, 0.0) && half->contains(c, 0.0);
        },
        probe, pt(-1.0, -1.0), pt(1.0, 1.0), 41, 26);
    CHECK(distance(probe, qq) <= distance(probe, oracle) + 1e-6);
    CHECK(box->contains(qq, 1e-8));
    CHECK(half->contains(qq, 1e-8));
  }
}

TEST_CASE("dykstra reports empty intersections as non-convergence") {
  ProjectionSettings settings;
  settings.max_inner_iterations = 4000;
  auto left = std::make_shared<BoxSet>(pt(-2.0, -1.0), pt(-1.0, 1.0));
  auto right = std::make_shared<BoxSet>(pt(1.0, -1.0), pt(2.0, 1.0));
  CHECK_THROWS_AS(
      project_intersection_dykstra({left, right}, pt(0.0, 0.0), settings),
      NonConvergenceError);
}

namespace {

LiftedFunction linf_function() {
  LiftedFunction f;
  f.name = "sup-norm";
  f.value = [](const LiftedPoint& p) { return lifted_norm(p, NormKind::Linf); };
  f.subgradient = [](const LiftedPoint& p) {
    LiftedPoint g = LiftedPoint::zero(p.dim());
    double best = 0.0;
    int arg = -1;
    for (int i = 0; i < p.dim(); ++i)
      if (std::abs(p.base(i)) > best) { best = std::abs(p.base(i)); arg = i; }
    if (std::abs(p.height) > best) {
      g.height = p.height >= 0 ? 1.0 : -1.0;
    } else if (arg >= 0) {
      g.base(arg) = p.base(arg) >= 0 ? 1.0 : -1.0;
    }
    return g;
  };
  return f;
}

// Minkowski gauge of the parabola region {(y, h) : y >= h^2}: value h^2/y on
// the open right half-plane.
LiftedFunction parabola_gauge_function() {
  LiftedFunction f;
  f.name = "parabola-gauge";
  f.value = [](const LiftedPoint& p) {
    const double v = p.base(0), u = p.height;
    if (v > 0.0) return u * u / v;
    if (std::abs(u) <= 1e-300 && std::abs(v) <= 1e-300) return 0.0;
    return std::numeric_limits<double>::infinity();
  };
  f.subgradient = [](const LiftedPoint& p) {
    const double v = p.base(0), u = p.height;
    LiftedPoint g = LiftedPoint::zero(1);
    g.base(0) = -(u * u) / (v * v);
    g.height = 2.0 * u / v;
    return g;
  };
  return f;
}

}  // namespace

TEST_CASE("sublevel projection matches the closed-form clamp for the sup-norm") {
  ProjectionSettings settings;
  settings.tolerance = 1e-10;
  const LiftedFunction f = linf_function();
  const LiftedPoint q = project_sublevel_subgrad(f, 1.0, pt(2.0, 0.0), settings);
  CHECK(distance(q, pt(1.0, 0.0)) <= 1e-7);

  const LiftedPoint inside = pt(0.4, -0.2);
  CHECK(distance(project_sublevel_subgrad(f, 1.0, inside, settings), inside) == 0.0);
}

TEST_CASE("sublevel projection handles a gauge with restricted domain") {
  ProjectionSettings settings;
  settings.tolerance = 1e-9;
  const LiftedFunction f = parabola_gauge_function();
  const HalfspaceSet domain(pt(-1.0, 0.0), 0.0);  // v >= 0

  const LiftedPoint p = pt(-1.0, 2.0);
  const LiftedPoint q = project_sublevel_subgrad(f, 1.0, p, settings, &domain);
  CHECK(f.value(q) <= 1.0 + 1e-8);

  const LiftedPoint oracle = grid_nearest_feasible(
      [&](const LiftedPoint& c) {
        return c.base(0) >= 0.0 && c.height * c.height <= c.base(0);
      },
      p, pt(0.0, -0.5), pt(4.0, 3.0), 41, 26);
  CHECK(std::abs(distance(p, q) - distance(p, oracle)) <= 1e-3);
  CHECK(distance(p, q) <= distance(p, oracle) + 1e-6);

  // independent route: the nearest boundary point solves 2u^3 + 3u - 2 = 0
  double u_exact = 0.5;
  for (int it = 0; it < 60; ++it) {
    const double F = 2 * u_exact * u_exact * u_exact + 3 * u_exact - 2;
    const double dF = 6 * u_exact * u_exact + 3;
    u_exact -= F / dF;
  }
  CHECK(distance(q, pt(u_exact * u_exact, u_exact)) <= 1e-5);
}

TEST_CASE("sublevel projection flags an unattainable level") {
  ProjectionSettings settings;
  LiftedFunction f;
  f.name = "norm-plus-one";
  f.value = [](const LiftedPoint& p) { return norm(p) + 1.0; };
  f.subgradient = [](const LiftedPoint& p) {
    const double n = norm(p);
    return n > 0 ? (1.0 / n) * p : LiftedPoint::zero(p.dim());
  };
  CHECK_THROWS_AS(project_sublevel_subgrad(f, 0.5, pt(2.0, 2.0), settings),
                  InfeasibleLevelError);
}

TEST_CASE("projection oracles pass the firm-nonexpansivity sample audit") {
  ProjectionSettings settings;
  auto box = std::make_shared<BoxSet>(pt(-1.0, -0.5), pt(1.0, 2.0));
  auto half = std::make_shared<HalfspaceSet>(pt(1.0, 0.25), 0.0);
  auto ball1 = std::make_shared<BallSet>(pt(0.1, -0.2), 1.3, NormKind::L1);
  auto ball2 = std::make_shared<BallSet>(pt(0.0, 0.0), 1.0, NormKind::L2);
  auto balli = std::make_shared<BallSet>(pt(0.0, 0.5), 0.7, NormKind::Linf);
  const std::vector<ConvexSetPtr> oracles = {box, half, ball1, ball2, balli};

  const auto points = random_lifted(100, 1, 3.0, 51);
  const auto others = random_lifted(100, 1, 3.0, 52);
  for (const auto& set : oracles) {
    for (size_t i = 0; i < points.size(); ++i) {
      const LiftedPoint proj = set->project(points[i]);
      const LiftedPoint member = set->project(others[i]);
      CHECK(dot(member - proj, points[i] - proj) <= 1e-8);
      // idempotence
      CHECK(distance(set->project(proj), proj) <= 2e-8);
      // members are fixed
      CHECK(distance(set->project(member), member) <= 1e-10);
    }
  }
}
