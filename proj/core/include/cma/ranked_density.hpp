#pragma once

#include <cstdint>
#include <vector>

#include "cma/hyperparameters.hpp"
#include "cma/normalized_chain.hpp"
#include "cma/objectives.hpp"
#include "cma/sampling.hpp"
#include "cma/spd.hpp"

namespace cma {

struct QEstimate {
  double value = 0.0;
  double stderr_value = 0.0;
};

/// Analytic density of the ranked, selected sample block at a fixed state
/// (z, Sigma). The exceedance probability Q is estimated once by Monte Carlo
/// on a dedicated substream, so repeated evaluations are deterministic and
/// share the same draws.
class RankedDensityContext {
 public:
  RankedDensityContext(const Vector& z, const SpdMatrix& Sigma,
                       const Objective& f, const SampleDistribution& dist,
                       int lambda, int mu, int n_q, std::uint64_t seed);

  /// P[f*(z + sqrt(Sigma) xi) < f*(z + sqrt(Sigma) u)] over the cached draws.
  QEstimate q_exceed(const Vector& u) const;

  /// lambda!/(lambda-mu)! * 1{ranked strictly} * (1-Q(v_mu))^(lambda-mu)
  /// * prod_i p_U(v_i); columns of v are the mu ranked vectors.
  double density(const Matrix& v) const;

  /// Density of the selection-map output: det(Sigma)^(-1/2) *
  /// density(Sigma^(-1/2) v).
  double density_alpha(const Matrix& v) const;

  int lambda() const { return lambda_; }
  int mu() const { return mu_; }

 private:
  double f_at(const Vector& u) const;

  Vector z_;
  SpdMatrix Sigma_;
  Matrix sqrt_sigma_;
  Matrix inv_sqrt_sigma_;
  double det_sqrt_sigma_;
  const Objective& f_;
  const SampleDistribution& dist_;
  int lambda_;
  int mu_;
  std::vector<double> f_samples_;  // sorted f-values of the cached draws
};

/// Sum over the path of log density_alpha at the pre-step state, following
/// the deterministic transition; -infinity when some step has zero density
/// (the input sequence leaves the control set).
double path_log_density(const SmoothState& theta0, const Hyperparameters& hp,
                        const Objective& f, const SampleDistribution& dist,
                        const std::vector<Matrix>& path, int n_q,
                        std::uint64_t seed);

}  // namespace cma
