#pragma once

#include <optional>
#include <vector>

#include "cma/hyperparameters.hpp"
#include "cma/objectives.hpp"
#include "cma/raw_chain.hpp"
#include "cma/sampling.hpp"
#include "cma/spd.hpp"

namespace cma {

/// State (z, p, q, Sigma, r) with R(Sigma) = 1.
struct NormalizedState {
  Vector z;
  Vector p;
  Vector q;
  SpdMatrix Sigma;
  double r = 1.0;
};

/// State (z, p, q, Sigma_hat, r) with rho(Sigma_hat) = det^(1/d) = 1.
struct SmoothState {
  Vector z;
  Vector p;
  Vector q;
  SpdMatrix Sigma_hat;
  double r = 1.0;

  /// The canonical attractor (0, 0, 0, I_d, 1 - c_1 - c_mu).
  static SmoothState attractor(const Hyperparameters& hp);
};

/// The components that remain Markov when cumulation is switched off.
struct ProjectedState {
  Regime regime = Regime::NoPaths;
  Vector z;
  std::optional<Vector> p;  // kept for c_c = 1 only
  std::optional<Vector> q;  // kept for c_sigma = 1 only
  SpdMatrix Sigma_hat;
  std::optional<double> r;  // kept for c_sigma = 1 only
};

/// Builds the normalized state at time t from raw states at t-1 and t:
/// z = (m - x*)/(sigma sqrt(R(C))), p = p_sigma, q = p_c / sqrt(R(C_prev)),
/// Sigma = C / R(C), r = R(C) / R(C_prev).
NormalizedState normalize(const RawState& prev, const RawState& cur,
                          const Vector& xstar, const NormalizationFn& R);

/// One recursion step of the R-normalized chain; the permutation is computed
/// on f(x* + z + sqrt(Sigma) U^i), which sorts the raw candidates identically
/// for scaling-invariant f.
NormalizedState step_normalized(const NormalizedState& state,
                                const Hyperparameters& hp, const Objective& f,
                                const std::vector<Vector>& batch);

/// Rescales Sigma by 1/rho(Sigma) and stores r unchanged.
SmoothState xi(const NormalizedState& y);
/// Rescales Sigma_hat by 1/R(Sigma_hat); inverse of xi.
NormalizedState xi_inv(const SmoothState& x, const NormalizationFn& R);

/// Selection map: ranks f(x* + z + sqrt(Sigma) u^i) with Sigma =
/// Sigma_hat / R(Sigma_hat) and returns the mu best, each multiplied by
/// sqrt(Sigma), as columns of a d x mu matrix.
Matrix alpha_theta(const SmoothState& state, const Hyperparameters& hp,
                   const Objective& f, const std::vector<Vector>& batch);

/// Deterministic transition of the smooth chain given the selected input v
/// (columns are the mu selected, sqrt(Sigma)-scaled vectors).
SmoothState f_theta(const SmoothState& state, const Hyperparameters& hp,
                    const Matrix& v);

SmoothState step_smooth(const SmoothState& state, const Hyperparameters& hp,
                        const Objective& f, const std::vector<Vector>& batch);

/// Drops the redundant coordinates for the given regime; throws
/// RegimeMismatchError unless hp has c_sigma = 1 / c_c = 1 accordingly.
ProjectedState project(const SmoothState& state, const Hyperparameters& hp,
                       Regime regime);

ProjectedState step_projected(const ProjectedState& state,
                              const Hyperparameters& hp, const Objective& f,
                              const std::vector<Vector>& batch);

}  // namespace cma
