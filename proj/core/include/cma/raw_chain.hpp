#pragma once

#include <optional>
#include <vector>

#include "cma/hyperparameters.hpp"
#include "cma/objectives.hpp"
#include "cma/sampling.hpp"
#include "cma/spd.hpp"

namespace cma {

struct RawState {
  Vector m;
  Vector p_sigma;
  Vector p_c;
  double sigma = 1.0;
  SpdMatrix C;

  static RawState initial(const Vector& m0, double sigma0, int d);
};

Vector f_mean(const Vector& m, const Vector& v, double c_m);

Vector f_path(const Vector& p, const Vector& v, double c, double mu_eff);

double gamma_change(GammaVariant variant, const Vector& p, double c_sigma,
                    double d_sigma, const SampleDistribution& dist);

SpdMatrix f_cov(const SpdMatrix& C, const Vector& p, const Matrix& M, double c_1,
                double c_mu);

struct RawStepResult {
  RawState state;
  RankingPermutation ranking;
  std::vector<Vector> batch;  // the raw draws U^1..U^lambda
};

/// One full iteration. When `batch` is given the draws are reused instead of
/// sampled (for co-running chains on a shared stream); `fixed_ranking`
/// switches off selection entirely (neutral selection).
RawStepResult step_raw(const RawState& state, const Hyperparameters& hp,
                       const Objective& f, CounterRng& rng,
                       const SampleDistribution& dist,
                       const std::vector<Vector>* batch = nullptr,
                       const RankingPermutation* fixed_ranking = nullptr);

}  // namespace cma
