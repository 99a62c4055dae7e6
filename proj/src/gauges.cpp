#include "polarprox/gauges.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <mutex>
#include <sstream>
#include <stdexcept>

#include "polarprox/errors.hpp"

namespace polarprox {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// weight * ||.||
// ---------------------------------------------------------------------------

class NormGauge final : public Gauge {
 public:
  NormGauge(NormKind kind, double weight) : kind_(kind), weight_(weight) {
    if (weight_ <= 0.0) throw std::invalid_argument("norm gauge: weight must be positive");
  }

  double eval(const LiftedPoint& p) const override {
    return weight_ * lifted_norm(p, kind_);
  }

  LiftedPoint sublevel_project(double r, const LiftedPoint& p) const override {
    if (r < 0.0) throw std::invalid_argument("sublevel_project: negative radius");
    return project_ball(LiftedPoint::zero(p.dim()), r / weight_, kind_, p);
  }

  LiftedPoint domain_project(const LiftedPoint& p) const override { return p; }

  std::string descriptor() const override {
    std::ostringstream os;
    os << weight_ << "*" << norm_kind_name(kind_) << "-norm";
    return os.str();
  }

 private:
  NormKind kind_;
  double weight_;
};

// ---------------------------------------------------------------------------
// Minkowski gauge of a fundamental set
// ---------------------------------------------------------------------------

class MinkowskiGauge final : public Gauge {
 public:
  MinkowskiGauge(FundamentalSetDescriptor d, ProjectionSettings s)
      : d_(std::move(d)), settings_(s) {
    if (!d_.set) throw std::invalid_argument("minkowski gauge: missing set oracle");
    if (!d_.set->contains(LiftedPoint::zero(d_.lifted_dim - 1), 1e-9))
      throw std::invalid_argument("minkowski gauge: fundamental set must contain the origin");
  }

  double eval(const LiftedPoint& p) const override {
    const double n = norm(p);
    if (n == 0.0) return 0.0;
    // membership tolerance follows the scale of the rescaled query, otherwise
    // an absolute slack accepts p/mu for huge mu and masks infinite values
    auto inside = [&](double mu) {
      const LiftedPoint q = (1.0 / mu) * p;
      return d_.set->contains(q, 1e-12 * std::max(norm(q), 1e-30));
    };
    double hi = 1.0;
    if (!inside(hi)) {
      // grow the bracket geometrically; persistent failure means p is outside
      // the closed cone of D and the gauge value is +infinity
      do {
        hi *= 2.0;
        if (hi > 1e30) return kInf;
      } while (!inside(hi));
    }
    double lo = hi * 0.5;
    while (inside(lo)) {
      hi = lo;
      lo *= 0.5;
      if (lo < 1e-30) return 0.0;
    }
    for (int it = 0; it < 60; ++it) {
      const double mid = 0.5 * (lo + hi);
      if (inside(mid)) hi = mid;
      else lo = mid;
    }
    return 0.5 * (lo + hi);
  }

  LiftedPoint sublevel_project(double r, const LiftedPoint& p) const override {
    if (r < 0.0) throw std::invalid_argument("sublevel_project: negative radius");
    if (r <= 1e-14) return domain_project(p);
    return r * d_.set->project((1.0 / r) * p);
  }

  LiftedPoint domain_project(const LiftedPoint& p) const override {
    if (d_.cone) return d_.cone->project(p);
    // cl cone D = closure of the union of scaled copies; search the scale.
    const double s = std::max(1.0, norm(p));
    auto candidate = [&](double t) { return t * d_.set->project((1.0 / t) * p); };
    double best_t = 1.0;
    double best_d = distance(p, candidate(1.0));
    for (int k = -40; k <= 40; ++k) {
      const double t = s * std::pow(10.0, k * 0.15);
      const double dd = distance(p, candidate(t));
      if (dd < best_d) { best_d = dd; best_t = t; }
    }
    double lo = best_t / 1.5, hi = best_t * 1.5;
    for (int it = 0; it < 80; ++it) {
      const double m1 = lo + (hi - lo) / 3.0, m2 = hi - (hi - lo) / 3.0;
      if (distance(p, candidate(m1)) < distance(p, candidate(m2))) hi = m2;
      else lo = m1;
    }
    const double t = 0.5 * (lo + hi);
    LiftedPoint q = candidate(t);
    if (norm(p) < best_d) q = LiftedPoint::zero(p.dim());
    return distance(p, q) <= best_d ? q : candidate(best_t);
  }

  std::string descriptor() const override {
    return "minkowski[" + d_.set->descriptor() + "]";
  }

  int base_dim() const override { return d_.lifted_dim - 1; }

 private:
  FundamentalSetDescriptor d_;
  ProjectionSettings settings_;
};

// ---------------------------------------------------------------------------
// gauge + indicator
// ---------------------------------------------------------------------------

class DomainSetAdapter final : public ConvexSet {
 public:
  explicit DomainSetAdapter(GaugePtr g) : g_(std::move(g)) {}
  bool contains(const LiftedPoint& p, double) const override {
    return std::isfinite(g_->eval(p));
  }
  LiftedPoint project(const LiftedPoint& p) const override {
    return g_->domain_project(p);
  }
  std::string descriptor() const override { return "dom[" + g_->descriptor() + "]"; }
  int dim() const override { return g_->base_dim() >= 0 ? g_->base_dim() + 1 : -1; }

 private:
  GaugePtr g_;
};

class SublevelSetAdapter final : public ConvexSet {
 public:
  SublevelSetAdapter(GaugePtr g, double r, double tol)
      : g_(std::move(g)), r_(r), tol_(tol) {}
  bool contains(const LiftedPoint& p, double tol) const override {
    return g_->eval(p) <= r_ + std::max(tol, tol_);
  }
  LiftedPoint project(const LiftedPoint& p) const override {
    return g_->sublevel_project(r_, p);
  }
  std::string descriptor() const override {
    std::ostringstream os;
    os << "lev[" << g_->descriptor() << " <= " << r_ << "]";
    return os.str();
  }
  int dim() const override { return g_->base_dim() >= 0 ? g_->base_dim() + 1 : -1; }

 private:
  GaugePtr g_;
  double r_;
  double tol_;
};

class GaugePlusIndicator final : public Gauge {
 public:
  GaugePlusIndicator(GaugePtr g, ConvexSetPtr C, ProjectionSettings s)
      : g_(std::move(g)), C_(std::move(C)), settings_(s) {
    if (!g_ || !C_) throw std::invalid_argument("gauge_plus_indicator: null component");
    if (C_->dim() >= 1 &&
        !C_->contains(LiftedPoint::zero(C_->dim() - 1), 1e-9))
      throw std::invalid_argument("gauge_plus_indicator: indicator set must contain the origin");
  }

  double eval(const LiftedPoint& p) const override {
    if (!C_->contains(p, settings_.tolerance)) return kInf;
    return g_->eval(p);
  }

  LiftedPoint sublevel_project(double r, const LiftedPoint& p) const override {
    if (r < 0.0) throw std::invalid_argument("sublevel_project: negative radius");
    std::vector<ConvexSetPtr> sets{
        std::make_shared<SublevelSetAdapter>(g_, r, settings_.tolerance), C_};
    return project_intersection_dykstra(sets, p, settings_);
  }

  LiftedPoint domain_project(const LiftedPoint& p) const override {
    std::vector<ConvexSetPtr> sets{std::make_shared<DomainSetAdapter>(g_), C_};
    return project_intersection_dykstra(sets, p, settings_);
  }

  std::string descriptor() const override {
    return g_->descriptor() + " + indicator[" + C_->descriptor() + "]";
  }

  int base_dim() const override { return g_->base_dim(); }

 private:
  GaugePtr g_;
  ConvexSetPtr C_;
  ProjectionSettings settings_;
};

// ---------------------------------------------------------------------------
// perspective transform
// ---------------------------------------------------------------------------

// Supporting halfspaces {<s, u> <= 1} of the unit sublevel set, shared by all
// levels through positive homogeneity. The pool is memoization only: every cut
// stored is a valid outer bound, so reuse never changes what the projector is
// allowed to return.
class UnitCutPool {
 public:
  void add(const Vector& s) {
    std::lock_guard<std::mutex> lock(mu_);
    for (const auto& c : cuts_)
      if ((c - s).lpNorm<Eigen::Infinity>() <= 1e-10 * (1.0 + s.lpNorm<Eigen::Infinity>()))
        return;
    if (cuts_.size() >= 512) cuts_.erase(cuts_.begin());
    cuts_.push_back(s);
  }

  std::vector<Vector> snapshot() const {
    std::lock_guard<std::mutex> lock(mu_);
    return cuts_;
  }

 private:
  mutable std::mutex mu_;
  std::vector<Vector> cuts_;
};

class PerspectiveGauge final : public Gauge {
 public:
  PerspectiveGauge(ConvexFunctionSpec f, ProjectionSettings s)
      : f_(std::move(f)), settings_(s) {
    if (!f_.value || !f_.subgradient)
      throw std::invalid_argument("perspective gauge: function needs value and subgradient");
  }

  double eval(const LiftedPoint& p) const override {
    if (p.dim() != f_.dim)
      throw std::invalid_argument("perspective gauge: dimension mismatch");
    const double h = p.height;
    if (h < -1e-12) return kInf;
    if (h <= 1e-13) {
      if (!f_.recession)
        throw MissingRecessionError(f_.name + ": height-zero query without recession oracle");
      return f_.recession(p.base);
    }
    return h * f_.value(p.base / h);
  }

  LiftedPoint sublevel_project(double r, const LiftedPoint& p) const override {
    if (r < 0.0) throw std::invalid_argument("sublevel_project: negative radius");
    const double feas = settings_.tolerance * std::max(1.0, r);
    if (p.height >= 0.0 && eval(p) <= r + feas) return p;
    if (f_.base_sublevel_project && f_.known_min)
      return sublevel_project_by_height(r, p);

    std::vector<Vector> rows;
    std::vector<double> rhs;
    for (const Vector& s : pool_.snapshot()) {
      const double n = s.norm();
      if (n <= 1e-300) continue;
      rows.push_back(s / n);
      rhs.push_back(r / n);
    }
    // hard domain constraint: height >= 0
    Vector dom = Vector::Zero(p.dim() + 1);
    dom(p.dim()) = -1.0;
    rows.push_back(dom);
    rhs.push_back(0.0);

    const Vector pf = flatten(p);
    LiftedPoint q = p;
    int stalls = 0;
    for (int outer = 0; outer < 400; ++outer) {
      q = unflatten(detail::project_onto_halfspaces(rows, rhs, pf, nullptr));
      if (q.height < 0.0) q.height = 0.0;
      double v = eval(q);
      if (v <= r + feas) return q;
      if (!std::isfinite(v)) {
        q.height = std::max(q.height, 1e-9 * (1.0 + norm(q)));
        v = eval(q);
        if (!std::isfinite(v)) {
          if (++stalls > 6)
            throw NonConvergenceError(descriptor() + ": no usable cut near the domain boundary");
          continue;
        }
      }
      const LiftedPoint s = lifted_subgradient(q);
      if (!s.all_finite() || norm(s) <= 1e-14) {
        if (++stalls > 6)
          throw NonConvergenceError(descriptor() + ": degenerate subgradient cut");
        continue;
      }
      // local level cut at q itself
      const double sn = norm(s);
      rows.push_back(flatten(s) / sn);
      rhs.push_back((r - v + dot(s, q)) / sn);
      // pool the supporting halfspace of the unit set when the boundary point
      // q / v is well scaled (the cut transfers to every level by homogeneity)
      const LiftedPoint z = (1.0 / v) * q;
      if (z.height > 1e-6 * (1.0 + norm(z))) {
        LiftedPoint su = lifted_subgradient(z);
        const double c = dot(su, z);  // Euler identity: equals eval(z) = 1
        if (su.all_finite() && c > 1e-12) {
          su = (1.0 / c) * su;
          pool_.add(flatten(su));
        }
      }
    }
    throw NonConvergenceError(descriptor() + ": sublevel projection budget exhausted");
  }

  LiftedPoint domain_project(const LiftedPoint& p) const override {
    // cl dom of the perspective of a full-domain f is X x R>=0
    LiftedPoint q = p;
    q.height = std::max(q.height, 0.0);
    return q;
  }

  std::string descriptor() const override { return "perspective[" + f_.name + "]"; }

  int base_dim() const override { return f_.dim; }

  const ConvexFunctionSpec& function() const { return f_; }

 private:
  // subgradient of the perspective at height > 0: (g, f(z) - <g, z>) with
  // z = x/h and g a subgradient of f at z; heights at or below zero are nudged.
  LiftedPoint lifted_subgradient(const LiftedPoint& p) const {
    const double h = std::max(p.height, 1e-9 * (1.0 + norm(p)));
    const Vector z = p.base / h;
    const Vector gsub = f_.subgradient(z);
    return {gsub, f_.value(z) - gsub.dot(z)};
  }

  // Exact reduction of the level-set projection to one dimension: the squared
  // distance from p to the slice at height h is convex in h, and each slice
  // {x : h f(x/h) <= r} is a scaled base sublevel set.
  LiftedPoint sublevel_project_by_height(double r, const LiftedPoint& p) const {
    const double min_value = f_.known_min->first;
    if (r <= 1e-14) {
      // level-zero edge: the zero set is the ray through (minimizer, 1) when
      // the minimum vanishes, the origin otherwise
      if (min_value > 1e-14) return LiftedPoint::zero(p.dim());
      const LiftedPoint ray{f_.known_min->second, 1.0};
      const double t = std::max(0.0, dot(p, ray) / squared_norm(ray));
      return t * ray;
    }

    const double h_cap = min_value > 0 ? r / min_value
                                       : std::max(1.0, p.height + norm(p) + r);
    const double h_lo = 1e-14 * std::max(1.0, std::abs(p.height));
    auto slice_point = [&](double h) {
      const Vector scaled = p.base / h;
      const Vector proj = f_.base_sublevel_project(r / h, scaled);
      return LiftedPoint{h * proj, h};
    };
    auto phi = [&](double h) { return squared_norm(slice_point(h) - p); };

    double lo = h_lo, hi = std::min(h_cap, std::abs(p.height) + norm(p) + r + 1.0);
    if (hi <= lo) hi = h_cap;
    for (int it = 0; it < 200 && (hi - lo) > 1e-13 * std::max(1.0, hi); ++it) {
      const double m1 = lo + (hi - lo) / 3.0;
      const double m2 = hi - (hi - lo) / 3.0;
      if (phi(m1) <= phi(m2)) hi = m2;
      else lo = m1;
    }
    return slice_point(0.5 * (lo + hi));
  }

  ConvexFunctionSpec f_;
  ProjectionSettings settings_;
  mutable UnitCutPool pool_;
};

// ---------------------------------------------------------------------------
// rescaling
// ---------------------------------------------------------------------------

class ScaledGauge final : public Gauge {
 public:
  ScaledGauge(GaugePtr inner, double alpha) : inner_(std::move(inner)), alpha_(alpha) {
    if (alpha_ <= 0.0) throw std::invalid_argument("rescale_gauge: alpha must be positive");
  }

  double eval(const LiftedPoint& p) const override { return alpha_ * inner_->eval(p); }

  LiftedPoint sublevel_project(double r, const LiftedPoint& p) const override {
    if (r < 0.0) throw std::invalid_argument("sublevel_project: negative radius");
    return inner_->sublevel_project(r / alpha_, p);
  }

  LiftedPoint domain_project(const LiftedPoint& p) const override {
    return inner_->domain_project(p);
  }

  std::string descriptor() const override {
    std::ostringstream os;
    os << alpha_ << "*(" << inner_->descriptor() << ")";
    return os.str();
  }

  int base_dim() const override { return inner_->base_dim(); }

 private:
  GaugePtr inner_;
  double alpha_;
};

}  // namespace

GaugePtr make_norm_gauge(NormKind kind, double weight) {
  return std::make_shared<NormGauge>(kind, weight);
}

GaugePtr make_minkowski_gauge(FundamentalSetDescriptor descriptor,
                              ProjectionSettings settings) {
  return std::make_shared<MinkowskiGauge>(std::move(descriptor), settings);
}

GaugePtr make_gauge_plus_indicator(GaugePtr g, ConvexSetPtr C,
                                   ProjectionSettings settings) {
  return std::make_shared<GaugePlusIndicator>(std::move(g), std::move(C), settings);
}

GaugePtr make_perspective_gauge(ConvexFunctionSpec f, ProjectionSettings settings) {
  return std::make_shared<PerspectiveGauge>(std::move(f), settings);
}

GaugePtr rescale_gauge(GaugePtr g, double alpha) {
  if (alpha == 1.0) return g;
  return std::make_shared<ScaledGauge>(std::move(g), alpha);
}

ConvexSetPtr make_sublevel_set(GaugePtr g, double r, double membership_tol) {
  return std::make_shared<SublevelSetAdapter>(std::move(g), r, membership_tol);
}

}  // namespace polarprox
