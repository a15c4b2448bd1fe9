#include "cma/raw_chain.hpp"

#include <cmath>

#include "cma/errors.hpp"

namespace cma {

RawState RawState::initial(const Vector& m0, double sigma0, int d) {
  RawState s;
  s.m = m0;
  s.p_sigma = Vector::Zero(d);
  s.p_c = Vector::Zero(d);
  s.sigma = sigma0;
  s.C = SpdMatrix(Matrix::Identity(d, d));
  return s;
}

Vector f_mean(const Vector& m, const Vector& v, double c_m) { return m + c_m * v; }

Vector f_path(const Vector& p, const Vector& v, double c, double mu_eff) {
  return (1.0 - c) * p + std::sqrt(c * (2.0 - c) * mu_eff) * v;
}

double gamma_change(GammaVariant variant, const Vector& p, double c_sigma,
                    double d_sigma, const SampleDistribution& dist) {
  if (variant == GammaVariant::CSA1) {
    return std::exp(c_sigma / d_sigma * (p.norm() / dist.mean_norm() - 1.0));
  }
  return std::exp(c_sigma / (2.0 * d_sigma) *
                  (p.squaredNorm() / dist.mean_sq_norm() - 1.0));
}

SpdMatrix f_cov(const SpdMatrix& C, const Vector& p, const Matrix& M, double c_1,
                double c_mu) {
  Matrix out = (1.0 - c_1 - c_mu) * C.mat() + c_1 * p * p.transpose() + c_mu * M;
  return SpdMatrix(SpdMatrix::symmetrize(out));
}

RawStepResult step_raw(const RawState& state, const Hyperparameters& hp,
                       const Objective& f, CounterRng& rng,
                       const SampleDistribution& dist,
                       const std::vector<Vector>* batch,
                       const RankingPermutation* fixed_ranking) {
  RawStepResult res;
  res.batch = batch ? *batch : sample_batch(dist, rng, hp.lambda);
  const Matrix sqrtC = state.C.sqrt().mat();

  if (fixed_ranking) {
    res.ranking = *fixed_ranking;
  } else {
    std::vector<Vector> candidates(hp.lambda);
    for (int i = 0; i < hp.lambda; ++i) {
      candidates[i] = state.m + state.sigma * sqrtC * res.batch[i];
    }
    res.ranking = rank_candidates(f, candidates);
  }

  Vector w_sum = Vector::Zero(hp.d);
  for (int i = 0; i < hp.mu; ++i) {
    w_sum += hp.weights(i) * res.batch[res.ranking.order[i]];
  }

  RawState& next = res.state;
  next.m = f_mean(state.m, state.sigma * sqrtC * w_sum, hp.c_m);
  next.p_sigma = f_path(state.p_sigma, w_sum, hp.c_sigma, hp.mu_eff);
  next.p_c = f_path(state.p_c, sqrtC * w_sum, hp.c_c, hp.mu_eff);
  next.sigma =
      state.sigma * gamma_change(hp.gamma_variant, next.p_sigma, hp.c_sigma,
                                 hp.d_sigma, dist);

  Matrix rank_mu = Matrix::Zero(hp.d, hp.d);
  for (int i = 0; i < hp.mu; ++i) {
    const Vector y = sqrtC * res.batch[res.ranking.order[i]];
    rank_mu += hp.cov_weights(i) * y * y.transpose();
  }
  next.C = f_cov(state.C, next.p_c, rank_mu, hp.c_1, hp.c_mu);

  if (!next.m.allFinite() || !next.p_sigma.allFinite() || !next.p_c.allFinite() ||
      !std::isfinite(next.sigma) || !next.C.mat().allFinite()) {
    throw NonFiniteError("non-finite component after raw step");
  }
  return res;
}

}  // namespace cma
