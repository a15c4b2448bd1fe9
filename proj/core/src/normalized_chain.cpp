#include "cma/normalized_chain.hpp"

#include <cmath>

#include "cma/errors.hpp"

namespace cma {

namespace {

Vector weighted_sum(const std::vector<Vector>& batch,
                    const RankingPermutation& ranking, const Vector& w, int d) {
  Vector out = Vector::Zero(d);
  for (int i = 0; i < static_cast<int>(w.size()); ++i) {
    out += w(i) * batch[ranking.order[i]];
  }
  return out;
}

Matrix rank_mu_term(const std::vector<Vector>& batch,
                    const RankingPermutation& ranking, const Vector& wc, int d) {
  Matrix out = Matrix::Zero(d, d);
  for (int i = 0; i < static_cast<int>(wc.size()); ++i) {
    const Vector& u = batch[ranking.order[i]];
    out += wc(i) * u * u.transpose();
  }
  return out;
}

RankingPermutation rank_offsprings(const Objective& f, const Vector& z,
                                   const Matrix& sqrt_sigma,
                                   const std::vector<Vector>& batch) {
  std::vector<double> values(batch.size());
  const Vector base = f.optimum + z;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    values[i] = f(base + sqrt_sigma * batch[i]);
  }
  return rank_by_values(values);
}

}  // namespace

SmoothState SmoothState::attractor(const Hyperparameters& hp) {
  SmoothState s;
  s.z = Vector::Zero(hp.d);
  s.p = Vector::Zero(hp.d);
  s.q = Vector::Zero(hp.d);
  s.Sigma_hat = SpdMatrix::identity(hp.d);
  s.r = 1.0 - hp.c_1 - hp.c_mu;
  return s;
}

NormalizedState normalize(const RawState& prev, const RawState& cur,
                          const Vector& xstar, const NormalizationFn& R) {
  const double r_cur = R(cur.C);
  const double r_prev = R(prev.C);
  NormalizedState out{
      (cur.m - xstar) / (cur.sigma * std::sqrt(r_cur)),
      cur.p_sigma,
      cur.p_c / std::sqrt(r_prev),
      SpdMatrix(cur.C.mat() / r_cur),
      r_cur / r_prev,
  };
  return out;
}

NormalizedState step_normalized(const NormalizedState& state,
                                const Hyperparameters& hp, const Objective& f,
                                const std::vector<Vector>& batch) {
  const Matrix sqrt_sigma = state.Sigma.sqrt().mat();
  const RankingPermutation s = rank_offsprings(f, state.z, sqrt_sigma, batch);
  const Vector w_sum = weighted_sum(batch, s, hp.weights, hp.d);

  const Vector p_next = f_path(state.p, w_sum, hp.c_sigma, hp.mu_eff);
  const Vector q_next = f_path(state.q / std::sqrt(state.r), sqrt_sigma * w_sum,
                               hp.c_c, hp.mu_eff);
  const Matrix mu_term =
      sqrt_sigma * rank_mu_term(batch, s, hp.cov_weights, hp.d) * sqrt_sigma;
  const SpdMatrix sigma_tilde = f_cov(state.Sigma, q_next, mu_term, hp.c_1, hp.c_mu);
  const double r_next = hp.normalization(sigma_tilde);
  const Vector z_next = (state.z + hp.c_m * (sqrt_sigma * w_sum)) /
                        (std::sqrt(r_next) * hp.gamma(p_next));

  NormalizedState out{z_next, p_next, q_next,
                      SpdMatrix(sigma_tilde.mat() / r_next), r_next};
  if (!out.z.allFinite() || !std::isfinite(out.r)) {
    throw NonFiniteError("non-finite component after normalized step");
  }
  return out;
}

SmoothState xi(const NormalizedState& y) {
  return SmoothState{y.z, y.p, y.q, SpdMatrix(y.Sigma.mat() / rho(y.Sigma)), y.r};
}

NormalizedState xi_inv(const SmoothState& x, const NormalizationFn& R) {
  return NormalizedState{x.z, x.p, x.q,
                         SpdMatrix(x.Sigma_hat.mat() / R(x.Sigma_hat)), x.r};
}

Matrix alpha_theta(const SmoothState& state, const Hyperparameters& hp,
                   const Objective& f, const std::vector<Vector>& batch) {
  const SpdMatrix Sigma(state.Sigma_hat.mat() / hp.normalization(state.Sigma_hat));
  const Matrix sqrt_sigma = Sigma.sqrt().mat();
  const RankingPermutation s = rank_offsprings(f, state.z, sqrt_sigma, batch);
  Matrix v(hp.d, hp.mu);
  for (int i = 0; i < hp.mu; ++i) {
    v.col(i) = sqrt_sigma * batch[s.order[i]];
  }
  return v;
}

SmoothState f_theta(const SmoothState& state, const Hyperparameters& hp,
                    const Matrix& v) {
  const SpdMatrix Sigma(state.Sigma_hat.mat() / hp.normalization(state.Sigma_hat));
  const Vector wv = v * hp.weights;

  const Vector p_next =
      f_path(state.p, Sigma.inv_sqrt().mat() * wv, hp.c_sigma, hp.mu_eff);
  const Vector q_next =
      f_path(state.q / std::sqrt(state.r), wv, hp.c_c, hp.mu_eff);
  Matrix mu_term = Matrix::Zero(hp.d, hp.d);
  for (int i = 0; i < hp.mu; ++i) {
    mu_term += hp.cov_weights(i) * v.col(i) * v.col(i).transpose();
  }
  const SpdMatrix sigma_tilde = f_cov(Sigma, q_next, mu_term, hp.c_1, hp.c_mu);
  const double r_next = hp.normalization(sigma_tilde);
  const Vector z_next =
      (state.z + hp.c_m * wv) / (std::sqrt(r_next) * hp.gamma(p_next));

  SmoothState out{z_next, p_next, q_next,
                  SpdMatrix(sigma_tilde.mat() / rho(sigma_tilde)), r_next};
  if (!out.z.allFinite() || !std::isfinite(out.r)) {
    throw NonFiniteError("non-finite component after smooth step");
  }
  return out;
}

SmoothState step_smooth(const SmoothState& state, const Hyperparameters& hp,
                        const Objective& f, const std::vector<Vector>& batch) {
  return f_theta(state, hp, alpha_theta(state, hp, f, batch));
}

ProjectedState project(const SmoothState& state, const Hyperparameters& hp,
                       Regime regime) {
  const bool no_sigma_path = hp.c_sigma >= 1.0;
  const bool no_cov_path = hp.c_c >= 1.0;
  ProjectedState out;
  out.regime = regime;
  out.z = state.z;
  out.Sigma_hat = state.Sigma_hat;
  switch (regime) {
    case Regime::NoSigmaPath:
      if (!no_sigma_path) {
        throw RegimeMismatchError("projection to (z,q,Sigma,r) needs c_sigma = 1");
      }
      out.q = state.q;
      out.r = state.r;
      break;
    case Regime::NoCovPath:
      if (!no_cov_path) {
        throw RegimeMismatchError("projection to (z,p,Sigma) needs c_c = 1");
      }
      out.p = state.p;
      break;
    case Regime::NoPaths:
      if (!(no_sigma_path && no_cov_path)) {
        throw RegimeMismatchError("projection to (z,Sigma) needs c_sigma = c_c = 1");
      }
      break;
    case Regime::Full:
      throw RegimeMismatchError("the full chain has no redundant coordinates");
  }
  return out;
}

ProjectedState step_projected(const ProjectedState& state,
                              const Hyperparameters& hp, const Objective& f,
                              const std::vector<Vector>& batch) {
  // placeholders for dropped coordinates; every use in the update carries an
  // exact-zero factor (1 - c_sigma or 1 - c_c), so the result is unaffected
  SmoothState full{state.z, state.p.value_or(Vector::Zero(hp.d)),
                   state.q.value_or(Vector::Zero(hp.d)), state.Sigma_hat,
                   state.r.value_or(1.0)};
  return project(step_smooth(full, hp, f, batch), hp, state.regime);
}

}  // namespace cma
