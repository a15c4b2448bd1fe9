#pragma once

#include <vector>

#include "cma/hyperparameters.hpp"
#include "cma/normalized_chain.hpp"
#include "cma/raw_chain.hpp"
#include "cma/sampling.hpp"
#include "cma/spd.hpp"

namespace cma::test {

inline Vector random_vector(CounterRng& rng, int d, double scale = 1.0) {
  Vector v(d);
  for (int i = 0; i < d; ++i) v(i) = scale * rng.next_gaussian();
  return v;
}

inline SpdMatrix random_spd(CounterRng& rng, int d, double ridge = 0.5) {
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = rng.next_gaussian();
  }
  return SpdMatrix(Matrix(a * a.transpose() / d + ridge * Matrix::Identity(d, d)));
}

inline Hyperparameters test_hp(int d, Regime regime = Regime::Full,
                               GammaVariant variant = GammaVariant::CSA1) {
  Hyperparameters hp = default_hyperparameters(d, variant);
  if (regime == Regime::NoSigmaPath || regime == Regime::NoPaths) {
    hp.c_sigma = 1.0;
    hp.d_sigma = 0.0;
  }
  if (regime == Regime::NoCovPath || regime == Regime::NoPaths) hp.c_c = 1.0;
  hp.finalize();
  return hp;
}

inline RawState random_raw_state(CounterRng& rng, int d) {
  RawState s;
  s.m = random_vector(rng, d);
  s.p_sigma = random_vector(rng, d);
  s.p_c = random_vector(rng, d);
  s.sigma = 0.3 + rng.next_double();
  s.C = random_spd(rng, d);
  return s;
}

inline NormalizedState random_normalized_state(CounterRng& rng, int d,
                                               const NormalizationFn& R) {
  const SpdMatrix base = random_spd(rng, d);
  NormalizedState y{random_vector(rng, d), random_vector(rng, d),
                    random_vector(rng, d), SpdMatrix(base.mat() / R(base)),
                    0.5 + rng.next_double()};
  return y;
}

inline SmoothState random_smooth_state(CounterRng& rng, int d) {
  const SpdMatrix base = random_spd(rng, d);
  SmoothState s{random_vector(rng, d), random_vector(rng, d),
                random_vector(rng, d), SpdMatrix(base.mat() / rho(base)),
                0.5 + rng.next_double()};
  return s;
}

inline std::vector<RawState> run_raw_trajectory(const RawState& start,
                                                const Hyperparameters& hp,
                                                const Objective& f,
                                                std::uint64_t seed, int steps,
                                                std::uint64_t chain = 0) {
  const GaussianDistribution dist(hp.d);
  std::vector<RawState> traj{start};
  for (int t = 0; t < steps; ++t) {
    CounterRng rng(seed, chain, static_cast<std::uint64_t>(t));
    traj.push_back(step_raw(traj.back(), hp, f, rng, dist).state);
  }
  return traj;
}

}  // namespace cma::test
