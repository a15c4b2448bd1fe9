#include "cma/root_finding.hpp"

#include <cmath>

#include "cma/errors.hpp"

namespace cma {

double find_root(const std::function<double(double)>& g, double lo, double hi,
                 const RootOptions& opts) {
  if (lo > hi) std::swap(lo, hi);
  double flo = g(lo);
  double fhi = g(hi);
  if (flo == 0.0) return lo;
  if (fhi == 0.0) return hi;

  int expansions = 0;
  while (std::signbit(flo) == std::signbit(fhi)) {
    if (++expansions > opts.max_expansions) {
      throw BracketNotFoundError("no sign change within expansion budget");
    }
    const double width = hi - lo;
    lo -= width;
    hi += width;
    flo = g(lo);
    fhi = g(hi);
    if (flo == 0.0) return lo;
    if (fhi == 0.0) return hi;
  }

  double mid = 0.5 * (lo + hi);
  for (int it = 0; it < opts.max_bisections; ++it) {
    mid = 0.5 * (lo + hi);
    const double fmid = g(mid);
    if (fmid == 0.0 || std::abs(fmid) < opts.residual_tol) return mid;
    if (std::signbit(fmid) == std::signbit(flo)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
    if (hi - lo < 1e-16 * (1.0 + std::abs(mid))) break;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cma
