#pragma once

#include <functional>

namespace cma {

struct RootOptions {
  double residual_tol = 1e-12;
  int max_expansions = 60;
  int max_bisections = 200;
};

/// Finds a root of g in [lo, hi] by bisection, expanding the bracket
/// geometrically (factor 2 around the initial interval) until g changes
/// sign. Throws BracketNotFoundError if no sign change appears within the
/// expansion budget. Continuity of g is the only assumption.
double find_root(const std::function<double(double)>& g, double lo, double hi,
                 const RootOptions& opts = {});

}  // namespace cma
