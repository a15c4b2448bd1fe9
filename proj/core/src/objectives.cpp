#include "cma/objectives.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "cma/errors.hpp"

namespace cma {

Objective make_sphere(const Vector& xstar) {
  return Objective{"sphere",
                   [xstar](const Vector& x) { return (x - xstar).squaredNorm(); },
                   xstar};
}

Objective make_ellipsoid(const Vector& xstar) {
  const int d = static_cast<int>(xstar.size());
  Vector coeff(d);
  for (int i = 0; i < d; ++i) {
    coeff(i) = d > 1 ? std::pow(10.0, 6.0 * i / (d - 1)) : 1.0;
  }
  return Objective{"ellipsoid",
                   [xstar, coeff](const Vector& x) {
                     return (coeff.array() * (x - xstar).array().square()).sum();
                   },
                   xstar};
}

Objective make_norm1(const Vector& xstar) {
  return Objective{"norm1",
                   [xstar](const Vector& x) { return (x - xstar).lpNorm<1>(); },
                   xstar};
}

Objective make_linear(const Vector& xstar, const Vector& w) {
  Objective f{"linear",
              [xstar, w](const Vector& x) { return w.dot(x - xstar); }, xstar};
  f.claims_negligible_levels = true;  // hyperplanes are Lebesgue null
  return f;
}

Objective make_monotone_norm(const Vector& xstar,
                             std::function<double(double)> g,
                             const std::string& name) {
  return Objective{
      name,
      [xstar, g](const Vector& x) { return g((x - xstar).norm()); }, xstar};
}

Objective objective_by_name(const std::string& name, const Vector& xstar) {
  if (name == "sphere") return make_sphere(xstar);
  if (name == "ellipsoid") return make_ellipsoid(xstar);
  if (name == "norm1") return make_norm1(xstar);
  if (name == "linear") return make_linear(xstar, Vector::Ones(xstar.size()));
  if (name == "log-sphere") {
    return make_monotone_norm(
        xstar, [](double t) { return std::log1p(t); }, "log-sphere");
  }
  if (name == "cubic-norm") {
    return make_monotone_norm(
        xstar, [](double t) { return t * t * t; }, "cubic-norm");
  }
  throw ConfigError("unknown objective: " + name);
}

RankingPermutation rank_by_values(const std::vector<double>& values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw NonFiniteError("non-finite objective value");
  }
  std::vector<int> order(values.size());
  std::iota(order.begin(), order.end(), 0);
  // stable sort on the value alone implements the index tie-break
  std::stable_sort(order.begin(), order.end(),
                   [&](int a, int b) { return values[a] < values[b]; });
  return RankingPermutation{std::move(order)};
}

RankingPermutation rank_candidates(const Objective& f,
                                   const std::vector<Vector>& points) {
  std::vector<double> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) values[i] = f(points[i]);
  return rank_by_values(values);
}

ScalingInvarianceReport probe_scaling_invariance(const Objective& f,
                                                 const Vector& xstar, int trials,
                                                 CounterRng& rng) {
  const int d = static_cast<int>(xstar.size());
  ScalingInvarianceReport report;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    Vector x(d), y(d);
    for (int i = 0; i < d; ++i) {
      x(i) = rng.next_gaussian();
      y(i) = rng.next_gaussian();
    }
    // log-uniform scale in (0.01, 100)
    const double scale = std::pow(10.0, -2.0 + 4.0 * rng.next_double());
    const bool base = f(x + xstar) <= f(y + xstar);
    const bool scaled = f(scale * x + xstar) <= f(scale * y + xstar);
    if (base != scaled) ++report.violations;
  }
  return report;
}

}  // namespace cma
