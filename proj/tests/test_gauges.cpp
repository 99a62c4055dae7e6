#include <cmath>
#include <limits>

#include "doctest.h"
#include "polarprox/errors.hpp"
#include "polarprox/gauges.hpp"
#include "support/instances.hpp"
#include "support/oracles.hpp"

using namespace polarprox;
using polarprox::testing::pt;
using polarprox::testing::random_lifted;

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

ConvexSetPtr unit_inf_ball() {
  return std::make_shared<BallSet>(pt(0.0, 0.0), 1.0, NormKind::Linf);
}

// {(y,h) : h^2 - y <= 0} realized through the generic sublevel machinery.
ConvexSetPtr parabola_region() {
  ProjectionSettings settings;
  settings.tolerance = 1e-10;
  LiftedFunction f;
  f.name = "parabola-margin";
  f.value = [](const LiftedPoint& p) { return p.height * p.height - p.base(0); };
  f.subgradient = [](const LiftedPoint& p) {
    LiftedPoint g = LiftedPoint::zero(1);
    g.base(0) = -1.0;
    g.height = 2.0 * p.height;
    return g;
  };
  class MarginSet final : public ConvexSet {
   public:
    MarginSet(LiftedFunction fn, ProjectionSettings s) : fn_(std::move(fn)), s_(s) {}
    bool contains(const LiftedPoint& p, double tol) const override {
      return fn_.value(p) <= tol;
    }
    LiftedPoint project(const LiftedPoint& p) const override {
      return project_sublevel_subgrad(fn_, 0.0, p, s_);
    }
    std::string descriptor() const override { return "parabola-region"; }
    int dim() const override { return 2; }

   private:
    LiftedFunction fn_;
    ProjectionSettings s_;
  };
  return std::make_shared<MarginSet>(std::move(f), settings);
}

}  // namespace

TEST_CASE("norm gauges evaluate weighted lifted norms") {
  const GaugePtr ginf = make_norm_gauge(NormKind::Linf, 1.0);
  CHECK(ginf->eval(pt(3.0, -4.0)) == 4.0);
  CHECK(ginf->eval(pt(0.0, 0.0)) == 0.0);

  const GaugePtr g4 = make_norm_gauge(NormKind::Linf, 4.0);
  CHECK(g4->eval(pt(0.2, -0.05)) == doctest::Approx(0.8).epsilon(1e-14));

  CHECK_THROWS_AS(make_norm_gauge(NormKind::L2, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(make_norm_gauge(NormKind::L2, -1.0), std::invalid_argument);
}

TEST_CASE("minkowski gauge of the unit sup-norm ball reproduces the norm") {
  ProjectionSettings settings;
  FundamentalSetDescriptor d;
  d.set = unit_inf_ball();
  d.lifted_dim = 2;
  d.bounded = true;
  const GaugePtr g = make_minkowski_gauge(d, settings);

  CHECK(g->eval(pt(3.0, -4.0)) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(g->eval(pt(0.0, 0.0)) == 0.0);
  for (const auto& p : random_lifted(100, 1, 3.0, 61)) {
    CHECK(std::abs(g->eval(p) - lifted_norm(p, NormKind::Linf)) <= 1e-8);
  }
}

TEST_CASE("minkowski gauge of the parabola region") {
  const GaugePtr g = polarprox::testing::parabola_gauge(parabola_region());
  CHECK(g->eval(pt(1.0, 1.0)) == doctest::Approx(1.0).epsilon(1e-10));
  CHECK(g->eval(pt(4.0, 1.0)) == doctest::Approx(0.25).epsilon(1e-9));
  CHECK(g->eval(pt(0.0, 0.0)) == 0.0);
  // outside the closed cone of the region
  CHECK(g->eval(pt(-1.0, 0.5)) == kInf);
}

TEST_CASE("fundamental sets must contain the origin") {
  ProjectionSettings settings;
  FundamentalSetDescriptor d;
  d.set = std::make_shared<BoxSet>(pt(1.0, 1.0), pt(2.0, 2.0));
  d.lifted_dim = 2;
  CHECK_THROWS_AS(make_minkowski_gauge(d, settings), std::invalid_argument);
}

TEST_CASE("scaled copies of a fundamental set nest") {
  const GaugePtr g = polarprox::testing::parabola_gauge(parabola_region());
  const auto region = parabola_region();
  for (const auto& raw : random_lifted(20, 1, 2.0, 62)) {
    const LiftedPoint member = region->project(raw);
    for (const double r1 : {0.25, 0.5, 1.0}) {
      CHECK(g->eval(r1 * member) <= r1 + 1e-7);  // r1*D sits inside r2*D for r2 >= r1
    }
  }
}

TEST_CASE("gauge plus whole-space indicator behaves as the gauge") {
  ProjectionSettings settings;
  const GaugePtr inner = make_norm_gauge(NormKind::Linf, 4.0);
  const GaugePtr g =
      make_gauge_plus_indicator(inner, std::make_shared<WholeSpaceSet>(), settings);
  for (const auto& p : random_lifted(50, 1, 3.0, 63)) {
    CHECK(g->eval(p) == doctest::Approx(inner->eval(p)).epsilon(1e-12));
  }
}

TEST_CASE("halfspace-restricted sup-norm gauge") {
  const GaugePtr g = polarprox::testing::counterexample_gauge();
  CHECK(g->eval(pt(2.0, 1.0)) == kInf);  // outside the halfspace
  CHECK(g->eval(pt(0.0, 0.0)) == 0.0);
  CHECK(g->eval(pt(-0.05, 0.2)) == doctest::Approx(0.8).epsilon(1e-12));
  // sublevel projection = box cap intersected with the halfspace
  const LiftedPoint q = g->sublevel_project(0.8, pt(-0.05, 1.0));
  CHECK(distance(q, pt(-0.05, 0.2)) <= 1e-7);
}

TEST_CASE("perspective gauge of the shifted absolute value") {
  ProjectionSettings settings;
  const GaugePtr g = make_perspective_gauge(make_shifted_abs(1.0, 1.0), settings);
  CHECK(g->eval(pt(1.0, 1.0)) == doctest::Approx(1.0));
  CHECK(g->eval(pt(2.0, 2.0)) == doctest::Approx(2.0));
  // height zero evaluates the recession function
  CHECK(g->eval(pt(3.0, 0.0)) == doctest::Approx(3.0));
  // and the recession is the numeric limit of the perspective formula
  CHECK(g->eval(pt(3.0, 1e-8)) == doctest::Approx(3.0).epsilon(1e-6));
  CHECK(g->eval(pt(0.5, -1.0)) == kInf);
}

TEST_CASE("perspective gauge without a recession oracle rejects height zero") {
  ProjectionSettings settings;
  ConvexFunctionSpec f = make_shifted_abs(0.0, 1.0);
  f.recession = nullptr;
  const GaugePtr g = make_perspective_gauge(f, settings);
  CHECK_THROWS_AS(g->eval(pt(1.0, 0.0)), MissingRecessionError);
}

TEST_CASE("rescaling a gauge scales values and delegates level sets") {
  const GaugePtr base = make_norm_gauge(NormKind::Linf, 1.0);
  CHECK(rescale_gauge(base, 1.0).get() == base.get());

  const GaugePtr scaled = rescale_gauge(base, 4.0);
  CHECK(scaled->eval(pt(0.2, -0.05)) == doctest::Approx(0.8).epsilon(1e-14));
  CHECK(scaled->eval(pt(0.0, 0.0)) == 0.0);
  CHECK_THROWS_AS(rescale_gauge(base, 0.0), std::invalid_argument);

  const GaugePtr weighted = make_norm_gauge(NormKind::Linf, 4.0);
  for (const auto& p : random_lifted(30, 1, 2.0, 64)) {
    CHECK(scaled->eval(p) == doctest::Approx(weighted->eval(p)).epsilon(1e-12));
    CHECK(distance(scaled->sublevel_project(1.0, p),
                   weighted->sublevel_project(1.0, p)) <= 1e-10);
  }
}

TEST_CASE("gauge axioms hold on samples for every construction") {
  ProjectionSettings settings;
  std::vector<GaugePtr> gauges = {
      make_norm_gauge(NormKind::L1, 1.0),
      make_norm_gauge(NormKind::L2, 2.5),
      make_norm_gauge(NormKind::Linf, 4.0),
      polarprox::testing::counterexample_gauge(),
      make_perspective_gauge(make_shifted_abs(1.0, 1.0), settings),
      make_perspective_gauge(make_shifted_quadratic(Vector::Constant(1, 1.0), 2.0),
                             settings),
      polarprox::testing::parabola_gauge(parabola_region()),
  };
  FundamentalSetDescriptor ball;
  ball.set = unit_inf_ball();
  ball.lifted_dim = 2;
  ball.bounded = true;
  gauges.push_back(make_minkowski_gauge(ball, settings));

  for (const auto& g : gauges) {
    CAPTURE(g->descriptor());
    CHECK(g->eval(LiftedPoint::zero(1)) == 0.0);
    int finite_seen = 0;
    for (const auto& p : random_lifted(100, 1, 2.0, 65)) {
      const double v = g->eval(p);
      CHECK(v >= 0.0);
      if (!std::isfinite(v)) continue;
      ++finite_seen;
      for (const double t : {0.5, 2.0, 10.0}) {
        const double vt = g->eval(t * p);
        CHECK(std::abs(vt - t * v) <= 1e-7 * (1.0 + t * v));
      }
    }
    CHECK(finite_seen > 0);
  }
}

TEST_CASE("sublevel projections land inside the level set") {
  ProjectionSettings settings;
  std::vector<GaugePtr> gauges = {
      make_norm_gauge(NormKind::Linf, 4.0),
      polarprox::testing::counterexample_gauge(),
      make_perspective_gauge(make_shifted_abs(1.0, 1.0), settings),
      make_perspective_gauge(make_shifted_quadratic(Vector::Constant(1, 1.0), 2.0),
                             settings),
  };
  const std::vector<double> radii = {0.3, 1.0, 2.7};
  for (const auto& g : gauges) {
    CAPTURE(g->descriptor());
    for (const auto& p : random_lifted(25, 1, 3.0, 66)) {
      for (const double r : radii) {
        const LiftedPoint q = g->sublevel_project(r, p);
        CHECK(g->eval(q) <= r + 1e-6);
        if (g->eval(p) <= r) CHECK(distance(q, p) <= 1e-9);
        // idempotence within tolerance
        CHECK(distance(g->sublevel_project(r, q), q) <= 2e-7);
      }
    }
  }
}

TEST_CASE("generic cut projector agrees with the height reduction") {
  // strip the closed-form base projector so the perspective gauge is forced
  // through the subgradient-cut path, then compare against the exact route
  ProjectionSettings settings;
  settings.tolerance = 1e-9;
  ConvexFunctionSpec generic = make_shifted_quadratic(Vector::Constant(1, 1.0), 2.0);
  generic.base_sublevel_project = nullptr;
  const GaugePtr via_cuts = make_perspective_gauge(generic, settings);
  const GaugePtr exact = make_perspective_gauge(
      make_shifted_quadratic(Vector::Constant(1, 1.0), 2.0), settings);

  for (const auto& p : random_lifted(15, 1, 3.0, 70)) {
    for (const double r : {0.5, 1.0, 3.0}) {
      const LiftedPoint q1 = via_cuts->sublevel_project(r, p);
      const LiftedPoint q2 = exact->sublevel_project(r, p);
      CHECK(via_cuts->eval(q1) <= r + 1e-7);
      CHECK(distance(p, q1) <= distance(p, q2) + 1e-6);
      CHECK(distance(q1, q2) <= 1e-4);
    }
  }
}

TEST_CASE("domain projection fixes exactly the finite-value points on samples") {
  ProjectionSettings settings;
  std::vector<GaugePtr> gauges = {
      polarprox::testing::counterexample_gauge(),
      make_perspective_gauge(make_shifted_abs(1.0, 1.0), settings),
      polarprox::testing::parabola_gauge(parabola_region()),
  };
  for (const auto& g : gauges) {
    CAPTURE(g->descriptor());
    for (const auto& p : random_lifted(60, 1, 2.0, 67)) {
      const bool finite = std::isfinite(g->eval(p));
      const double moved = distance(g->domain_project(p), p);
      if (finite) CHECK(moved <= 1e-7);
      else CHECK(moved > 1e-9);
    }
  }
}

TEST_CASE("perspective values are lower semicontinuous at height zero on samples") {
  ProjectionSettings settings;
  const GaugePtr gabs = make_perspective_gauge(make_shifted_abs(1.0, 1.0), settings);
  const GaugePtr gquad = make_perspective_gauge(
      make_shifted_quadratic(Vector::Constant(1, 1.0), 2.0), settings);
  for (const auto& p : random_lifted(40, 1, 3.0, 68)) {
    const LiftedPoint at_zero{p.base, 0.0};
    const LiftedPoint near_zero{p.base, 1e-9};
    const double limit_abs = gabs->eval(at_zero);
    CHECK(gabs->eval(near_zero) >= limit_abs - 1e-4);
    // superlinear growth: infinite recession off the origin
    if (std::abs(p.base(0)) > 1e-3) {
      CHECK(gquad->eval(at_zero) == kInf);
      CHECK(gquad->eval(near_zero) >= 1e5);
    }
  }
}

TEST_CASE("convex function specs pass convexity and recession spot checks") {
  std::vector<ConvexFunctionSpec> fns = {
      make_shifted_abs(1.0, 1.0),
      make_shifted_quadratic(Vector::Constant(2, -0.5), 0.5),
      make_constant(2.0, 1),
      make_plateau(0.0, 1.0, 1.0),
  };
  std::mt19937_64 rng(69);
  std::uniform_real_distribution<double> unif(-3.0, 3.0);
  for (const auto& f : fns) {
    CAPTURE(f.name);
    for (int k = 0; k < 100; ++k) {
      Vector x(f.dim), y(f.dim);
      for (int i = 0; i < f.dim; ++i) {
        x(i) = unif(rng);
        y(i) = unif(rng);
      }
      const double t = 0.5 * (unif(rng) / 3.0 + 1.0);  // in (0,1)
      CHECK(f.value(t * x + (1 - t) * y) <= t * f.value(x) + (1 - t) * f.value(y) + 1e-9);
      // subgradient inequality
      const Vector g = f.subgradient(x);
      CHECK(f.value(y) >= f.value(x) + g.dot(y - x) - 1e-9);
      // recession is positively homogeneous where finite
      const double r = f.recession(x);
      if (std::isfinite(r)) {
        CHECK(f.recession(2.0 * x) == doctest::Approx(2.0 * r).epsilon(1e-9));
      }
    }
  }
}
