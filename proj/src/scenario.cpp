#include "polarprox/scenario.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "polarprox/errors.hpp"

namespace polarprox::cli {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// ---------------------------------------------------------------------------
// structured sets used by scenarios
// ---------------------------------------------------------------------------

namespace {

// {(y, h) in R x R : y >= h^2}; the projection solves the stationarity cubic
// of the squared distance to the boundary.
class ParabolaSet final : public ConvexSet {
 public:
  bool contains(const LiftedPoint& p, double tol) const override {
    return p.height * p.height - p.base(0) <= tol;
  }

  LiftedPoint project(const LiftedPoint& p) const override {
    const double v = p.base(0), u = p.height;
    if (u * u <= v) return p;
    // minimize (t^2 - v)^2 + (t - u)^2 over t: 2t^3 + (1 - 2v)t - u = 0
    const double P = (1.0 - 2.0 * v) / 2.0;
    const double Q = -u / 2.0;
    std::vector<double> roots;
    const double disc = 0.25 * Q * Q + P * P * P / 27.0;
    if (disc >= 0.0) {
      const double sq = std::sqrt(disc);
      roots.push_back(std::cbrt(-0.5 * Q + sq) + std::cbrt(-0.5 * Q - sq));
    } else {
      const double m = 2.0 * std::sqrt(-P / 3.0);
      const double theta =
          std::acos(std::clamp(3.0 * Q / (P * m), -1.0, 1.0)) / 3.0;
      for (int k = 0; k < 3; ++k)
        roots.push_back(m * std::cos(theta - 2.0 * M_PI * k / 3.0));
    }
    double best_t = 0.0, best_obj = std::numeric_limits<double>::infinity();
    for (double t : roots) {
      // polish the stationarity residual
      for (int it = 0; it < 6; ++it) {
        const double f = 2.0 * t * t * t + (1.0 - 2.0 * v) * t - u;
        const double df = 6.0 * t * t + (1.0 - 2.0 * v);
        if (std::abs(df) < 1e-14) break;
        t -= f / df;
      }
      const double obj = (t * t - v) * (t * t - v) + (t - u) * (t - u);
      if (obj < best_obj) {
        best_obj = obj;
        best_t = t;
      }
    }
    LiftedPoint q = p;
    q.base(0) = best_t * best_t;
    q.height = best_t;
    return q;
  }

  std::string descriptor() const override { return "parabola-region"; }
  int dim() const override { return 2; }
};

class IntersectionSet final : public ConvexSet {
 public:
  IntersectionSet(std::vector<ConvexSetPtr> sets, ProjectionSettings settings)
      : sets_(std::move(sets)), settings_(settings) {}

  bool contains(const LiftedPoint& p, double tol) const override {
    for (const auto& s : sets_)
      if (!s->contains(p, tol)) return false;
    return true;
  }

  LiftedPoint project(const LiftedPoint& p) const override {
    return project_intersection_dykstra(sets_, p, settings_);
  }

  std::string descriptor() const override {
    std::string d = "intersection[";
    for (size_t i = 0; i < sets_.size(); ++i)
      d += (i ? ", " : "") + sets_[i]->descriptor();
    return d + "]";
  }

  int dim() const override {
    for (const auto& s : sets_)
      if (s->dim() > 0) return s->dim();
    return -1;
  }

 private:
  std::vector<ConvexSetPtr> sets_;
  ProjectionSettings settings_;
};

// ---------------------------------------------------------------------------
// config parsing
// ---------------------------------------------------------------------------

[[noreturn]] void fail(const std::string& field, const std::string& message) {
  throw ConfigError(field + ": " + message);
}

const json& require_field(const json& j, const std::string& ctx,
                          const std::string& field) {
  if (!j.is_object()) fail(ctx, "expected an object");
  auto it = j.find(field);
  if (it == j.end()) fail(ctx + "." + field, "missing required field");
  return *it;
}

double as_number(const json& j, const std::string& field) {
  if (!j.is_number()) fail(field, "expected a number");
  return j.get<double>();
}

int as_int(const json& j, const std::string& field) {
  if (!j.is_number_integer()) fail(field, "expected an integer");
  return j.get<int>();
}

std::string as_string(const json& j, const std::string& field) {
  if (!j.is_string()) fail(field, "expected a string");
  return j.get<std::string>();
}

Vector as_vector(const json& j, const std::string& field) {
  if (!j.is_array() || j.empty()) fail(field, "expected a nonempty array of numbers");
  Vector v(j.size());
  for (size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) fail(field, "expected numbers");
    v(i) = j[i].get<double>();
  }
  return v;
}

// lifted coordinates as [base..., height]
LiftedPoint as_lifted(const json& j, const std::string& field) {
  const Vector v = as_vector(j, field);
  if (v.size() < 2) fail(field, "lifted coordinates need at least [base, height]");
  return unflatten(v);
}

NormKind as_norm_kind(const json& j, const std::string& field) {
  const std::string s = as_string(j, field);
  if (s == "l1") return NormKind::L1;
  if (s == "l2") return NormKind::L2;
  if (s == "linf") return NormKind::Linf;
  fail(field, "expected one of l1, l2, linf");
}

ConvexSetPtr parse_set(const json& j, const std::string& ctx,
                       const ProjectionSettings& settings) {
  const std::string type = as_string(require_field(j, ctx, "type"), ctx + ".type");
  if (type == "box") {
    return std::make_shared<BoxSet>(
        as_lifted(require_field(j, ctx, "lower"), ctx + ".lower"),
        as_lifted(require_field(j, ctx, "upper"), ctx + ".upper"));
  }
  if (type == "halfspace") {
    return std::make_shared<HalfspaceSet>(
        as_lifted(require_field(j, ctx, "normal"), ctx + ".normal"),
        as_number(require_field(j, ctx, "offset"), ctx + ".offset"));
  }
  if (type == "ball") {
    return std::make_shared<BallSet>(
        as_lifted(require_field(j, ctx, "center"), ctx + ".center"),
        as_number(require_field(j, ctx, "radius"), ctx + ".radius"),
        as_norm_kind(require_field(j, ctx, "kind"), ctx + ".kind"));
  }
  if (type == "parabola") return std::make_shared<ParabolaSet>();
  if (type == "whole") return std::make_shared<WholeSpaceSet>();
  if (type == "intersection") {
    const json& arr = require_field(j, ctx, "sets");
    if (!arr.is_array() || arr.empty()) fail(ctx + ".sets", "expected a nonempty array");
    std::vector<ConvexSetPtr> sets;
    for (size_t i = 0; i < arr.size(); ++i)
      sets.push_back(parse_set(arr[i], ctx + ".sets[" + std::to_string(i) + "]", settings));
    return std::make_shared<IntersectionSet>(std::move(sets), settings);
  }
  fail(ctx + ".type", "unknown set type '" + type + "'");
}

ConvexFunctionSpec parse_function(const json& j, const std::string& ctx) {
  const std::string name = as_string(require_field(j, ctx, "name"), ctx + ".name");
  if (name == "shifted-abs") {
    return make_shifted_abs(
        as_number(require_field(j, ctx, "center"), ctx + ".center"),
        as_number(require_field(j, ctx, "offset"), ctx + ".offset"));
  }
  if (name == "shifted-quadratic") {
    return make_shifted_quadratic(
        as_vector(require_field(j, ctx, "center"), ctx + ".center"),
        as_number(require_field(j, ctx, "offset"), ctx + ".offset"));
  }
  if (name == "constant") {
    return make_constant(as_number(require_field(j, ctx, "value"), ctx + ".value"),
                         as_int(require_field(j, ctx, "dim"), ctx + ".dim"));
  }
  if (name == "plateau") {
    return make_plateau(as_number(require_field(j, ctx, "center"), ctx + ".center"),
                        as_number(require_field(j, ctx, "halfwidth"), ctx + ".halfwidth"),
                        as_number(require_field(j, ctx, "offset"), ctx + ".offset"));
  }
  fail(ctx + ".name", "unknown function '" + name + "'");
}

GaugePtr parse_gauge(const json& j, const std::string& ctx,
                     const ProjectionSettings& settings,
                     std::optional<ConvexFunctionSpec>& function_out) {
  const std::string type = as_string(require_field(j, ctx, "type"), ctx + ".type");
  if (type == "norm") {
    const double weight = as_number(require_field(j, ctx, "weight"), ctx + ".weight");
    if (weight <= 0) fail(ctx + ".weight", "must be positive");
    return make_norm_gauge(as_norm_kind(require_field(j, ctx, "kind"), ctx + ".kind"),
                           weight);
  }
  if (type == "minkowski") {
    FundamentalSetDescriptor d;
    d.set = parse_set(require_field(j, ctx, "set"), ctx + ".set", settings);
    d.lifted_dim = j.contains("dim") ? as_int(j.at("dim"), ctx + ".dim")
                                     : (d.set->dim() > 0 ? d.set->dim() : 2);
    if (j.contains("bounded")) {
      if (!j.at("bounded").is_boolean()) fail(ctx + ".bounded", "expected a boolean");
      d.bounded = j.at("bounded").get<bool>();
    }
    if (j.contains("scaling_hint"))
      d.scaling_hint = as_number(j.at("scaling_hint"), ctx + ".scaling_hint");
    if (j.contains("cone"))
      d.cone = parse_set(j.at("cone"), ctx + ".cone", settings);
    return make_minkowski_gauge(std::move(d), settings);
  }
  if (type == "gauge_plus_indicator") {
    std::optional<ConvexFunctionSpec> inner_fn;
    GaugePtr inner =
        parse_gauge(require_field(j, ctx, "inner"), ctx + ".inner", settings, inner_fn);
    return make_gauge_plus_indicator(
        std::move(inner), parse_set(require_field(j, ctx, "set"), ctx + ".set", settings),
        settings);
  }
  if (type == "perspective") {
    ConvexFunctionSpec f =
        parse_function(require_field(j, ctx, "function"), ctx + ".function");
    function_out = f;
    return make_perspective_gauge(std::move(f), settings);
  }
  fail(ctx + ".type", "unknown gauge type '" + type + "'");
}

const std::vector<std::string> kKnownAudits = {
    "fejer",  "shadow-limit",          "facial",
    "t-fqne", "composite-contraction", "fqne-search"};

}  // namespace

ScenarioConfig parse_scenario_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("config", std::string("not valid JSON (") + e.what() + ")");
  }
  if (!j.is_object()) fail("config", "expected a JSON object");

  ScenarioConfig cfg;
  if (j.contains("name")) cfg.name = as_string(j.at("name"), "name");
  if (j.contains("seed")) cfg.seed = static_cast<std::uint64_t>(as_int(j.at("seed"), "seed"));

  ProjectionSettings settings;
  if (j.contains("projection")) {
    const json& p = j.at("projection");
    if (p.contains("tolerance")) settings.tolerance = as_number(p.at("tolerance"), "projection.tolerance");
    if (p.contains("max_inner_iterations"))
      settings.max_inner_iterations = as_int(p.at("max_inner_iterations"), "projection.max_inner_iterations");
    if (settings.tolerance <= 0) fail("projection.tolerance", "must be positive");
    if (settings.max_inner_iterations < 1) fail("projection.max_inner_iterations", "must be >= 1");
  }

  cfg.gauge = parse_gauge(require_field(j, "config", "gauge"), "gauge", settings,
                          cfg.function);

  if (j.contains("alpha")) cfg.alpha = as_number(j.at("alpha"), "alpha");
  if (cfg.alpha <= 0) fail("alpha", "must be positive");
  if (j.contains("gamma")) cfg.gamma = as_number(j.at("gamma"), "gamma");
  if (cfg.gamma < 0 || cfg.gamma >= 1) fail("gamma", "must lie in [0, 1)");
  if (j.contains("gamma_sweep")) {
    const json& arr = j.at("gamma_sweep");
    if (!arr.is_array() || arr.empty()) fail("gamma_sweep", "expected a nonempty array");
    for (size_t i = 0; i < arr.size(); ++i) {
      const double g = as_number(arr[i], "gamma_sweep[" + std::to_string(i) + "]");
      if (g < 0 || g >= 1) fail("gamma_sweep", "entries must lie in [0, 1)");
      cfg.gamma_sweep.push_back(g);
    }
  }

  const json& start = require_field(j, "config", "start");
  if (start.is_array()) {
    cfg.start = LiftedPoint::lift(as_vector(start, "start"));
  } else if (start.is_object()) {
    cfg.start.base = as_vector(require_field(start, "start", "base"), "start.base");
    cfg.start.height = as_number(require_field(start, "start", "height"), "start.height");
    if (cfg.start.height != 1.0)
      fail("start.height", "iteration starts on the height-1 slice");
  } else {
    fail("start", "expected an array (base, auto-lifted) or {base, height}");
  }
  if (!cfg.start.all_finite()) fail("start", "coordinates must be finite");
  if (cfg.gauge->base_dim() >= 0 && cfg.gauge->base_dim() != cfg.start.dim())
    fail("start", "dimension does not match the gauge (expected " +
                      std::to_string(cfg.gauge->base_dim()) + ")");

  if (j.contains("solver")) {
    const json& s = j.at("solver");
    if (s.contains("max_iterations"))
      cfg.solver.max_iterations = as_int(s.at("max_iterations"), "solver.max_iterations");
    if (s.contains("fixed_point_tolerance"))
      cfg.solver.fixed_point_tolerance =
          as_number(s.at("fixed_point_tolerance"), "solver.fixed_point_tolerance");
    if (s.contains("divergence_guard"))
      cfg.solver.divergence_guard = as_number(s.at("divergence_guard"), "solver.divergence_guard");
    if (s.contains("trace_stride"))
      cfg.solver.trace_stride = as_int(s.at("trace_stride"), "solver.trace_stride");
    if (cfg.solver.max_iterations < 1) fail("solver.max_iterations", "must be >= 1");
    if (cfg.solver.fixed_point_tolerance <= 0)
      fail("solver.fixed_point_tolerance", "must be positive");
    if (cfg.solver.divergence_guard <= 0) fail("solver.divergence_guard", "must be positive");
    if (cfg.solver.trace_stride < 1) fail("solver.trace_stride", "must be >= 1");
  }
  cfg.solver.alpha = cfg.alpha;
  cfg.solver.gamma = cfg.gamma;

  if (j.contains("audits")) {
    const json& arr = j.at("audits");
    if (!arr.is_array()) fail("audits", "expected an array of audit names");
    for (size_t i = 0; i < arr.size(); ++i) {
      const std::string a = as_string(arr[i], "audits[" + std::to_string(i) + "]");
      if (std::find(kKnownAudits.begin(), kKnownAudits.end(), a) == kKnownAudits.end())
        fail("audits[" + std::to_string(i) + "]", "unknown audit '" + a + "'");
      cfg.audits.push_back(a);
    }
  }
  if (j.contains("fqne")) {
    const json& f = j.at("fqne");
    if (f.contains("budget")) cfg.fqne_probe_budget = as_int(f.at("budget"), "fqne.budget");
    if (f.contains("box_halfwidth"))
      cfg.fqne_box_halfwidth = as_number(f.at("box_halfwidth"), "fqne.box_halfwidth");
    if (cfg.fqne_probe_budget < 1) fail("fqne.budget", "must be >= 1");
    if (cfg.fqne_box_halfwidth <= 0) fail("fqne.box_halfwidth", "must be positive");
  }
  if (j.contains("reference_fixed_point")) {
    const json& r = j.at("reference_fixed_point");
    LiftedPoint ref;
    ref.base = as_vector(require_field(r, "reference_fixed_point", "base"),
                         "reference_fixed_point.base");
    ref.height = as_number(require_field(r, "reference_fixed_point", "height"),
                           "reference_fixed_point.height");
    if (ref.height != 1.0) fail("reference_fixed_point.height", "must be 1");
    cfg.reference_fixed_point = ref;
  }

  if (j.contains("outputs")) {
    const json& o = j.at("outputs");
    if (o.contains("trace")) cfg.trace_path = as_string(o.at("trace"), "outputs.trace");
    if (o.contains("summary")) cfg.summary_path = as_string(o.at("summary"), "outputs.summary");
    if (o.contains("grid")) {
      const json& gr = o.at("grid");
      GridSpec spec;
      spec.x_min = as_number(require_field(gr, "outputs.grid", "x_min"), "outputs.grid.x_min");
      spec.x_max = as_number(require_field(gr, "outputs.grid", "x_max"), "outputs.grid.x_max");
      spec.lambda_min =
          as_number(require_field(gr, "outputs.grid", "lambda_min"), "outputs.grid.lambda_min");
      spec.lambda_max =
          as_number(require_field(gr, "outputs.grid", "lambda_max"), "outputs.grid.lambda_max");
      spec.resolution =
          as_int(require_field(gr, "outputs.grid", "resolution"), "outputs.grid.resolution");
      if (gr.contains("path")) spec.path = as_string(gr.at("path"), "outputs.grid.path");
      if (spec.resolution < 2) fail("outputs.grid.resolution", "must be >= 2");
      if (spec.x_max <= spec.x_min) fail("outputs.grid.x_max", "must exceed x_min");
      if (spec.lambda_max <= spec.lambda_min)
        fail("outputs.grid.lambda_max", "must exceed lambda_min");
      if (cfg.start.dim() != 1)
        fail("outputs.grid", "envelope grids need a 1-dimensional base space");
      cfg.grid = spec;
    }
  }
  return cfg;
}

GaugePtr parse_gauge_json(const std::string& text,
                          std::optional<ConvexFunctionSpec>* function_out) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("gauge", std::string("not valid JSON (") + e.what() + ")");
  }
  std::optional<ConvexFunctionSpec> fn;
  GaugePtr g = parse_gauge(j, "gauge", ProjectionSettings{}, fn);
  if (function_out) *function_out = fn;
  return g;
}

ConvexFunctionSpec parse_function_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    fail("function", std::string("not valid JSON (") + e.what() + ")");
  }
  return parse_function(j, "function");
}

ScenarioConfig load_scenario_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) fail("config", "cannot open '" + path.string() + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_scenario_json(buf.str());
}

// ---------------------------------------------------------------------------
// builtin scenarios
// ---------------------------------------------------------------------------

namespace {

struct BuiltinEntry {
  BuiltinInfo info;
  const char* config;
};

const std::vector<BuiltinEntry>& builtin_table() {
  static const std::vector<BuiltinEntry> table = {
      {{"p4a-absolute-shift",
        "minimize |x-1|+1 through the perspective gauge; converges to (1/2, 1)"},
       R"({
  "name": "p4a-absolute-shift", "seed": 101,
  "gauge": {"type": "perspective", "function": {"name": "shifted-abs", "center": 1.0, "offset": 1.0}},
  "alpha": 1.0, "gamma": 0.0, "start": [5.0],
  "solver": {"max_iterations": 20000, "fixed_point_tolerance": 1e-9},
  "audits": ["fejer", "shadow-limit", "facial"]
})"},
      {{"p4a-quadratic-shift",
        "minimize ||x-c||^2+2 in R^2 through the perspective gauge"},
       R"({
  "name": "p4a-quadratic-shift", "seed": 102,
  "gauge": {"type": "perspective", "function": {"name": "shifted-quadratic", "center": [1.0, -1.0], "offset": 2.0}},
  "alpha": 1.0, "gamma": 0.0, "start": [4.0, 3.0],
  "solver": {"max_iterations": 20000, "fixed_point_tolerance": 1e-9},
  "audits": ["fejer", "shadow-limit", "facial"]
})"},
      {{"p4a-zero-min",
        "minimize |x-1| (infimum zero); shadows climb to height 1"},
       R"({
  "name": "p4a-zero-min", "seed": 103,
  "gauge": {"type": "perspective", "function": {"name": "shifted-abs", "center": 1.0, "offset": 0.0}},
  "alpha": 1.0, "gamma": 0.0, "start": [5.0],
  "solver": {"max_iterations": 20000, "fixed_point_tolerance": 1e-9},
  "audits": ["fejer", "shadow-limit"]
})"},
      {{"infnorm-envelope-grid",
        "envelope surface of the sup-norm gauge over the (x, lambda) plane"},
       R"({
  "name": "infnorm-envelope-grid", "seed": 104,
  "gauge": {"type": "norm", "kind": "linf", "weight": 1.0},
  "alpha": 1.0, "gamma": 0.0, "start": [2.0],
  "solver": {"max_iterations": 20000, "fixed_point_tolerance": 1e-9},
  "audits": ["fejer", "shadow-limit"],
  "outputs": {"grid": {"x_min": -2.0, "x_max": 2.0, "lambda_min": -2.0, "lambda_max": 2.0, "resolution": 101}}
})"},
      {{"cutter-counterexample",
        "weighted sup-norm plus halfspace indicator; the composite map fails the cutter inequality"},
       R"({
  "name": "cutter-counterexample", "seed": 105,
  "gauge": {"type": "gauge_plus_indicator",
            "inner": {"type": "norm", "kind": "linf", "weight": 4.0},
            "set": {"type": "halfspace", "normal": [1.0, 0.25], "offset": 0.0}},
  "alpha": 1.0, "gamma": 0.0, "start": [2.0],
  "solver": {"max_iterations": 20000, "fixed_point_tolerance": 1e-9},
  "reference_fixed_point": {"base": [-0.05], "height": 1.0},
  "audits": ["fqne-search"],
  "fqne": {"budget": 1000, "box_halfwidth": 3.0}
})"},
      {{"parabola-no-fixed-point",
        "Minkowski gauge of an unbounded parabola region; no fixed point, iterates drift"},
       R"({
  "name": "parabola-no-fixed-point", "seed": 106,
  "gauge": {"type": "minkowski", "set": {"type": "parabola"}, "dim": 2,
            "cone": {"type": "halfspace", "normal": [-1.0, 0.0], "offset": 0.0}},
  "alpha": 1.0, "gamma": 0.0, "start": [0.0],
  "solver": {"max_iterations": 20000, "fixed_point_tolerance": 1e-9},
  "audits": []
})"},
      {{"relaxed-sweep",
        "under-relaxation sweep (gamma 0, 0.25, 0.5) on the absolute-shift instance"},
       R"({
  "name": "relaxed-sweep", "seed": 107,
  "gauge": {"type": "perspective", "function": {"name": "shifted-abs", "center": 1.0, "offset": 1.0}},
  "alpha": 1.0, "gamma": 0.0, "gamma_sweep": [0.0, 0.25, 0.5], "start": [3.0],
  "solver": {"max_iterations": 20000, "fixed_point_tolerance": 1e-9},
  "audits": ["fejer", "shadow-limit"]
})"},
  };
  return table;
}

}  // namespace

const std::vector<BuiltinInfo>& list_builtin_scenarios() {
  static const std::vector<BuiltinInfo> infos = [] {
    std::vector<BuiltinInfo> v;
    for (const auto& e : builtin_table()) v.push_back(e.info);
    return v;
  }();
  return infos;
}

ScenarioConfig load_builtin_scenario(const std::string& name) {
  for (const auto& e : builtin_table())
    if (e.info.name == name) return parse_scenario_json(e.config);
  fail("builtin", "unknown builtin scenario '" + name + "'");
}

// ---------------------------------------------------------------------------
// outputs
// ---------------------------------------------------------------------------

namespace {

void write_trace_csv(const std::filesystem::path& path, const SolverTrace& trace,
                     const LiftedPoint& reference) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write trace to " + path.string());
  const int d = trace.final_point.dim();
  out << "iter";
  for (int i = 0; i < d; ++i) out << ",y" << i;
  out << ",yh";
  for (int i = 0; i < d; ++i) out << ",s" << i;
  out << ",sh,residual,fejer_distance\n";

  auto row = [&](int step, const LiftedPoint& y, const LiftedPoint& s, double res) {
    out << step;
    for (int i = 0; i < d; ++i) out << "," << format_double(y.base(i));
    out << "," << format_double(y.height);
    for (int i = 0; i < d; ++i) out << "," << format_double(s.base(i));
    out << "," << format_double(s.height);
    out << "," << format_double(res) << ","
        << format_double(distance(y, reference)) << "\n";
  };
  for (size_t jrow = 0; jrow < trace.iterates.size(); ++jrow) {
    const int n = trace.step_index[jrow];
    row(n, trace.iterates[jrow], trace.shadows[jrow],
        trace.residuals.empty() ? 0.0 : trace.residuals[static_cast<size_t>(n)]);
  }
  row(trace.steps, trace.final_point, trace.final_shadow, trace.final_residual);
}

ordered_json lifted_to_json(const LiftedPoint& p) {
  ordered_json j;
  j["base"] = std::vector<double>(p.base.data(), p.base.data() + p.base.size());
  j["height"] = p.height;
  return j;
}

ordered_json report_to_json(const PropertyReport& r) {
  ordered_json j;
  j["name"] = r.property_name;
  j["verdict"] = verdict_name(r.verdict);
  j["worst_violation"] = r.worst_violation;
  j["slack"] = r.slack;
  j["samples_tested"] = r.samples_tested;
  if (!r.note.empty()) j["note"] = r.note;
  if (!r.witnesses.empty()) {
    ordered_json w;
    w["point"] = lifted_to_json(r.witnesses.front().point);
    w["violation"] = r.witnesses.front().violation;
    if (r.witnesses.front().index >= 0) w["index"] = r.witnesses.front().index;
    if (!r.witnesses.front().note.empty()) w["note"] = r.witnesses.front().note;
    j["witness"] = w;
  }
  return j;
}

std::vector<LiftedPoint> random_slice_probes(int count, int dim, double halfwidth,
                                             std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-halfwidth, halfwidth);
  std::vector<LiftedPoint> probes;
  probes.reserve(count);
  for (int k = 0; k < count; ++k) {
    LiftedPoint p{Vector(dim), 1.0};
    for (int i = 0; i < dim; ++i) p.base(i) = unif(rng);
    probes.push_back(p);
  }
  return probes;
}

std::vector<LiftedPoint> random_lifted_probes(int count, int dim, double halfwidth,
                                              std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unif(-halfwidth, halfwidth);
  std::vector<LiftedPoint> probes;
  probes.reserve(count);
  for (int k = 0; k < count; ++k) {
    LiftedPoint p{Vector(dim), unif(rng)};
    for (int i = 0; i < dim; ++i) p.base(i) = unif(rng);
    probes.push_back(p);
  }
  return probes;
}

struct RunRecord {
  double gamma = 0.0;
  SolverTrace trace;
  std::vector<PropertyReport> audits;
  std::optional<FacialReport> facial;
  std::string trace_file;
};

}  // namespace

void emit_envelope_grid(const ScenarioConfig& config,
                        const std::filesystem::path& out_path) {
  if (!config.grid) throw ConfigError("outputs.grid: missing grid spec");
  if (config.start.dim() != 1)
    throw ConfigError("outputs.grid: envelope grids need a 1-dimensional base space");
  const GridSpec& spec = *config.grid;

  std::ofstream out(out_path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write grid to " + out_path.string());
  out << "x,lambda,envelope,case,prox_x,prox_lambda\n";
  const int n = spec.resolution;
  for (int i = 0; i < n; ++i) {
    const double x = spec.x_min + (spec.x_max - spec.x_min) * i / (n - 1);
    for (int k = 0; k < n; ++k) {
      const double lam = spec.lambda_min + (spec.lambda_max - spec.lambda_min) * k / (n - 1);
      LiftedPoint p{Vector(1), lam};
      p.base(0) = x;
      const PolarProxResult r = polar_prox(*config.gauge, config.alpha, p);
      out << format_double(x) << "," << format_double(lam) << ","
          << format_double(r.envelope_value) << "," << prox_case_name(r.case_tag)
          << "," << format_double(r.prox_point.base(0)) << ","
          << format_double(r.prox_point.height) << "\n";
    }
  }
}

namespace {

std::string gamma_suffix_path(const std::string& path, double gamma) {
  const auto dotpos = path.find_last_of('.');
  std::ostringstream tag;
  tag << "-g" << gamma;
  if (dotpos == std::string::npos) return path + tag.str();
  return path.substr(0, dotpos) + tag.str() + path.substr(dotpos);
}

}  // namespace

int run_scenario(const ScenarioConfig& config, const RunOptions& options) {
  const auto t0 = std::chrono::steady_clock::now();
  std::filesystem::create_directories(options.out_dir);
  const std::uint64_t seed = options.seed_override.value_or(config.seed);

  std::vector<double> gammas =
      config.gamma_sweep.empty() ? std::vector<double>{config.gamma} : config.gamma_sweep;

  std::vector<RunRecord> records;
  bool any_error = false;
  std::string error_message;

  for (double gamma : gammas) {
    RunRecord rec;
    rec.gamma = gamma;
    SolverConfig sc = config.solver;
    sc.alpha = config.alpha;
    sc.gamma = gamma;
    rec.trace = run_gp4a(*config.gauge, sc, config.start);
    if (rec.trace.status == SolverStatus::Error) {
      any_error = true;
      error_message = rec.trace.error_message;
    }

    const LiftedPoint reference = config.reference_fixed_point.value_or(rec.trace.final_point);
    rec.trace_file = gammas.size() == 1 ? config.trace_path
                                        : gamma_suffix_path(config.trace_path, gamma);
    write_trace_csv(options.out_dir / rec.trace_file, rec.trace, reference);

    const int dim = config.start.dim();
    for (const std::string& audit : config.audits) {
      try {
        if (audit == "fejer") {
          if (rec.trace.status == SolverStatus::Converged || config.reference_fixed_point) {
            rec.audits.push_back(audit_fejer(rec.trace, reference));
          } else {
            PropertyReport r;
            r.property_name = "fejer-monotonicity";
            r.verdict = Verdict::Inconclusive;
            r.note = "run did not converge and no reference point was supplied";
            rec.audits.push_back(r);
          }
        } else if (audit == "shadow-limit") {
          rec.audits.push_back(check_shadow_limit(rec.trace));
        } else if (audit == "facial") {
          if (!config.function)
            throw ConfigError("audits: facial requires a perspective gauge");
          ProjectionSettings settings;
          settings.tolerance = 1e-9;
          rec.facial = verify_facial_characterization(*config.function, rec.trace, settings);
          PropertyReport r;
          r.property_name = "facial-characterization";
          r.slack = 1e-4;
          r.samples_tested = static_cast<int>(rec.facial->consistency_errors.size());
          r.worst_violation = rec.facial->worst_error();
          r.finish();
          rec.audits.push_back(r);
        } else if (audit == "t-fqne") {
          const auto probes = random_lifted_probes(100, dim, 3.0, seed + 11);
          rec.audits.push_back(audit_T_fqne(*config.gauge, {LiftedPoint::zero(dim)},
                                            probes, config.alpha));
        } else if (audit == "composite-contraction") {
          const auto probes = random_slice_probes(100, dim, 3.0, seed + 13);
          rec.audits.push_back(audit_composite_contraction(*config.gauge, reference,
                                                           probes, config.alpha));
        } else if (audit == "fqne-search") {
          FqneSearchOptions opts;
          opts.box_halfwidth = config.fqne_box_halfwidth;
          opts.seed = seed + 17;
          opts.alpha = config.alpha;
          rec.audits.push_back(search_fqne_violation(*config.gauge, reference,
                                                     config.fqne_probe_budget, opts));
        }
      } catch (const std::exception& e) {
        any_error = true;
        error_message = e.what();
        PropertyReport r;
        r.property_name = audit;
        r.verdict = Verdict::Inconclusive;
        r.note = std::string("audit failed: ") + e.what();
        rec.audits.push_back(r);
      }
    }
    records.push_back(std::move(rec));
  }

  if (config.grid) emit_envelope_grid(config, options.out_dir / config.grid->path);

  // exit-code contract
  int exit_code = 0;
  for (const auto& rec : records) {
    if (rec.trace.status != SolverStatus::Converged) exit_code = std::max(exit_code, 1);
    for (const auto& a : rec.audits)
      if (a.verdict != Verdict::Holds) exit_code = std::max(exit_code, 1);
  }
  if (any_error) exit_code = 2;

  ordered_json summary;
  summary["name"] = config.name;
  summary["seed"] = seed;
  summary["alpha"] = config.alpha;
  summary["gauge"] = config.gauge->descriptor();
  summary["runs"] = ordered_json::array();
  for (const auto& rec : records) {
    ordered_json run;
    run["gamma"] = rec.gamma;
    run["status"] = solver_status_name(rec.trace.status);
    run["iterations"] = rec.trace.steps;
    run["final_point"] = lifted_to_json(rec.trace.final_point);
    run["final_shadow"] = lifted_to_json(rec.trace.final_shadow);
    run["residual"] = rec.trace.final_residual;
    if (rec.facial) {
      ordered_json fj;
      fj["lambda_prime"] = rec.facial->lambda_prime;
      fj["theta_prime"] = rec.facial->theta_prime;
      fj["r_prime"] = rec.facial->r_prime;
      ordered_json errs;
      for (const auto& [k, v] : rec.facial->consistency_errors) errs[k] = v;
      fj["consistency_errors"] = errs;
      run["facial"] = fj;
      run["lambda_prime"] = rec.facial->lambda_prime;
    } else {
      run["lambda_prime"] = nullptr;
    }
    if (!rec.trace.error_message.empty()) {
      run["error"] = rec.trace.error_message;
      run["error_iteration"] = rec.trace.error_iteration;
    }
    run["trace"] = rec.trace_file;
    run["audits"] = ordered_json::array();
    for (const auto& a : rec.audits) run["audits"].push_back(report_to_json(a));
    summary["runs"].push_back(run);
  }
  summary["exit_code"] = exit_code;
  if (any_error) summary["error"] = error_message;

  {
    std::ofstream out(options.out_dir / config.summary_path, std::ios::binary);
    if (!out)
      throw std::runtime_error("cannot write summary to " +
                               (options.out_dir / config.summary_path).string());
    out << summary.dump(2) << "\n";
  }

  const double elapsed =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  // timing stays out of the summary so reruns are byte-identical
  {
    std::ofstream log(options.out_dir / "run.log", std::ios::app);
    log << config.name << ": exit=" << exit_code << " wall_clock_seconds=" << elapsed
        << "\n";
  }
  for (const auto& rec : records) {
    std::cout << config.name << " gamma=" << rec.gamma << ": "
              << solver_status_name(rec.trace.status) << " in " << rec.trace.steps
              << " steps, residual " << format_double(rec.trace.final_residual);
    for (const auto& a : rec.audits)
      std::cout << ", " << a.property_name << "=" << verdict_name(a.verdict);
    std::cout << "\n";
  }
  std::cout << config.name << ": done in " << elapsed << " s, exit " << exit_code
            << "\n";
  return exit_code;
}

int run_all_builtins(const RunOptions& options) {
  const auto& infos = list_builtin_scenarios();
  std::vector<int> codes(infos.size(), 0);
  std::vector<std::thread> workers;
  for (size_t i = 0; i < infos.size(); ++i) {
    workers.emplace_back([&, i] {
      try {
        const ScenarioConfig cfg = load_builtin_scenario(infos[i].name);
        RunOptions opts = options;
        opts.out_dir = options.out_dir / infos[i].name;
        codes[i] = run_scenario(cfg, opts);
      } catch (const ConfigError&) {
        codes[i] = 3;
      } catch (const std::exception&) {
        codes[i] = 2;
      }
    });
  }
  for (auto& w : workers) w.join();
  return *std::max_element(codes.begin(), codes.end());
}

}  // namespace polarprox::cli
