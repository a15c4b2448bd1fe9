#pragma once

#include <functional>
#include <string>
#include <vector>

#include "cma/sampling.hpp"
#include "cma/spd.hpp"

namespace cma {

/// Deterministic objective function together with its optimum and the
/// invariance properties it claims (checked empirically, not trusted).
struct Objective {
  std::string name;
  std::function<double(const Vector&)> evaluate;
  Vector optimum;
  bool claims_scaling_invariant = true;
  bool claims_negligible_levels = true;

  double operator()(const Vector& x) const { return evaluate(x); }
};

Objective make_sphere(const Vector& xstar);
/// sum_i 10^(6(i-1)/(d-1)) (x_i - x*_i)^2; reduces to the sphere for d = 1.
Objective make_ellipsoid(const Vector& xstar);
Objective make_norm1(const Vector& xstar);
/// w . (x - x*); no minimum, scaling invariant, used for divergence probes.
Objective make_linear(const Vector& xstar, const Vector& w);
/// g(|x - x*|) for a strictly increasing continuous g.
Objective make_monotone_norm(const Vector& xstar,
                             std::function<double(double)> g,
                             const std::string& name);

Objective objective_by_name(const std::string& name, const Vector& xstar);

/// Permutation s with f(x_{s(1)}) <= ... <= f(x_{s(lambda)}); exact-equality
/// ties are broken by original index so the permutation is unique.
struct RankingPermutation {
  std::vector<int> order;  // order[k] = s(k+1) - 1, zero-based
  int size() const { return static_cast<int>(order.size()); }
};

RankingPermutation rank_by_values(const std::vector<double>& values);

RankingPermutation rank_candidates(const Objective& f,
                                   const std::vector<Vector>& points);

struct ScalingInvarianceReport {
  int trials = 0;
  int violations = 0;
};

/// Samples random (x, y, rho) and counts violations of
/// f(x+x*) <= f(y+x*)  <=>  f(rho x + x*) <= f(rho y + x*).
ScalingInvarianceReport probe_scaling_invariance(const Objective& f,
                                                 const Vector& xstar, int trials,
                                                 CounterRng& rng);

}  // namespace cma
