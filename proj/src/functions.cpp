#include "polarprox/functions.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace polarprox {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

double sign_or_zero(double x) { return x > 0 ? 1.0 : (x < 0 ? -1.0 : 0.0); }
}  // namespace

ConvexFunctionSpec make_shifted_abs(double center, double offset) {
  if (offset < 0) throw std::invalid_argument("shifted_abs: negative offset");
  ConvexFunctionSpec f;
  f.dim = 1;
  f.name = "abs(x-" + std::to_string(center) + ")+" + std::to_string(offset);
  f.value = [=](const Vector& x) { return std::abs(x(0) - center) + offset; };
  f.subgradient = [=](const Vector& x) {
    Vector g(1);
    g(0) = sign_or_zero(x(0) - center);
    return g;
  };
  f.recession = [](const Vector& x) { return std::abs(x(0)); };
  f.base_sublevel_project = [=](double level, const Vector& x) {
    const double half = std::max(level - offset, 0.0);
    Vector q(1);
    q(0) = std::clamp(x(0), center - half, center + half);
    return q;
  };
  Vector m(1);
  m(0) = center;
  f.known_min = {offset, m};
  return f;
}

ConvexFunctionSpec make_shifted_quadratic(Vector center, double offset) {
  if (offset < 0) throw std::invalid_argument("shifted_quadratic: negative offset");
  ConvexFunctionSpec f;
  f.dim = static_cast<int>(center.size());
  f.name = "quadratic(dim=" + std::to_string(f.dim) + ")+" + std::to_string(offset);
  f.value = [center, offset](const Vector& x) {
    return (x - center).squaredNorm() + offset;
  };
  f.subgradient = [center](const Vector& x) { return Vector(2.0 * (x - center)); };
  f.recession = [](const Vector& x) { return x.squaredNorm() > 0 ? kInf : 0.0; };
  f.base_sublevel_project = [center, offset](double level, const Vector& x) {
    const double radius = std::sqrt(std::max(level - offset, 0.0));
    const Vector d = x - center;
    const double n = d.norm();
    if (n <= radius) return x;
    return Vector(center + (radius / std::max(n, 1e-300)) * d);
  };
  f.known_min = {offset, center};
  return f;
}

ConvexFunctionSpec make_constant(double value, int dim) {
  if (value < 0) throw std::invalid_argument("constant: negative value");
  ConvexFunctionSpec f;
  f.dim = dim;
  f.name = "constant(" + std::to_string(value) + ")";
  f.value = [=](const Vector&) { return value; };
  f.subgradient = [dim](const Vector&) { return Vector(Vector::Zero(dim)); };
  f.recession = [](const Vector&) { return 0.0; };
  f.base_sublevel_project = [](double, const Vector& x) { return x; };
  f.known_min = {value, Vector::Zero(dim)};
  return f;
}

ConvexFunctionSpec make_plateau(double center, double halfwidth, double offset) {
  if (halfwidth < 0) throw std::invalid_argument("plateau: negative halfwidth");
  if (offset < 0) throw std::invalid_argument("plateau: negative offset");
  ConvexFunctionSpec f;
  f.dim = 1;
  f.name = "plateau(w=" + std::to_string(halfwidth) + ")+" + std::to_string(offset);
  f.value = [=](const Vector& x) {
    return std::max(std::abs(x(0) - center) - halfwidth, 0.0) + offset;
  };
  f.subgradient = [=](const Vector& x) {
    Vector g(1);
    const double d = x(0) - center;
    g(0) = std::abs(d) > halfwidth ? sign_or_zero(d) : 0.0;
    return g;
  };
  f.recession = [](const Vector& x) { return std::abs(x(0)); };
  f.base_sublevel_project = [=](double level, const Vector& x) {
    const double half = halfwidth + std::max(level - offset, 0.0);
    Vector q(1);
    q(0) = std::clamp(x(0), center - half, center + half);
    return q;
  };
  Vector m(1);
  m(0) = center;
  f.known_min = {offset, m};
  return f;
}

}  // namespace polarprox
