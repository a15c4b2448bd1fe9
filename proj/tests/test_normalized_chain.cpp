#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cma/errors.hpp"
#include "cma/normalized_chain.hpp"
#include "helpers.hpp"

using namespace cma;
using cma::test::random_smooth_state;
using cma::test::random_vector;
using cma::test::test_hp;

namespace {

std::vector<Vector> draw_batch(const Hyperparameters& hp, std::uint64_t seed,
                               std::uint64_t step) {
  const GaussianDistribution dist(hp.d);
  CounterRng rng(seed, 0, step);
  return sample_batch(dist, rng, hp.lambda);
}

}  // namespace

TEST_CASE("normalization of raw states reduces to its formula") {
  const NormalizationFn R = NormalizationFn::det_root();
  const int d = 2;
  RawState prev = RawState::initial(Vector::Ones(d), 2.0, d);
  RawState cur = prev;
  cur.m << 3.0, 1.0;
  cur.p_sigma << 0.5, -0.5;
  cur.p_c << 1.0, 0.0;

  const NormalizedState y = normalize(prev, cur, Vector::Zero(d), R);
  // C = C_prev = I: r = 1, Sigma = I, q = p_c, z = (m - x*)/sigma.
  CHECK(y.r == doctest::Approx(1.0).epsilon(1e-14));
  CHECK((y.Sigma.mat() - Matrix::Identity(d, d)).norm() < 1e-14);
  CHECK((y.q - cur.p_c).norm() < 1e-14);
  CHECK((y.p - cur.p_sigma).norm() < 1e-14);
  CHECK((y.z - cur.m / cur.sigma).norm() < 1e-14);

  cur.m = Vector::Zero(d);
  const NormalizedState at_opt = normalize(prev, cur, Vector::Zero(d), R);
  CHECK(at_opt.z.norm() == 0.0);
}

TEST_CASE("normalized covariance always satisfies the unit constraint") {
  CounterRng rng(41, 0, 0);
  const NormalizationFn variants[] = {NormalizationFn::det_root(),
                                      NormalizationFn::eigen(3)};
  for (const NormalizationFn& R : variants) {
    for (int trial = 0; trial < 50; ++trial) {
      RawState prev = cma::test::random_raw_state(rng, 3);
      RawState cur = cma::test::random_raw_state(rng, 3);
      const NormalizedState y = normalize(prev, cur, Vector::Zero(3), R);
      CHECK(std::abs(R(y.Sigma) - 1.0) < 1e-12);
      CHECK(y.r == doctest::Approx(R(cur.C) / R(prev.C)).epsilon(1e-12));
    }
  }
}

TEST_CASE("the zero state with zero inputs contracts deterministically") {
  const int d = 3;
  const Hyperparameters hp = test_hp(d);
  NormalizedState y{Vector::Zero(d), Vector::Zero(d), Vector::Zero(d),
                    SpdMatrix::identity(d), 1.0};
  const std::vector<Vector> zero_batch(hp.lambda, Vector::Zero(d));
  const Objective f = make_sphere(Vector::Zero(d));
  const NormalizedState next = step_normalized(y, hp, f, zero_batch);
  CHECK(next.z.norm() == 0.0);
  CHECK(next.q.norm() == 0.0);
  CHECK((next.Sigma.mat() - Matrix::Identity(d, d)).norm() < 1e-14);
  CHECK(next.r == doctest::Approx(1.0 - hp.c_1 - hp.c_mu).epsilon(1e-14));
}

TEST_CASE("normalizing a raw trajectory commutes with the normalized step") {
  const int d = 4;
  for (const NormalizationFn& R :
       {NormalizationFn::det_root(), NormalizationFn::eigen(d)}) {
    Hyperparameters hp = test_hp(d);
    hp.normalization = R;
    hp.finalize();
    const Vector xstar = Vector::Zero(d);
    const Objective f = make_norm1(xstar);
    const RawState start = RawState::initial(Vector::Ones(d), 1.5, d);
    const auto traj = cma::test::run_raw_trajectory(start, hp, f, 77, 200);
    for (int t = 1; t + 1 < static_cast<int>(traj.size()); ++t) {
      const NormalizedState y = normalize(traj[t - 1], traj[t], xstar, R);
      const NormalizedState expected = normalize(traj[t], traj[t + 1], xstar, R);
      const NormalizedState stepped =
          step_normalized(y, hp, f, draw_batch(hp, 77, t));
      CHECK((stepped.z - expected.z).norm() <= 1e-10 * (1.0 + expected.z.norm()));
      CHECK((stepped.p - expected.p).norm() <= 1e-10 * (1.0 + expected.p.norm()));
      CHECK((stepped.q - expected.q).norm() <= 1e-10 * (1.0 + expected.q.norm()));
      CHECK((stepped.Sigma.mat() - expected.Sigma.mat()).norm() <= 1e-10);
      CHECK(std::abs(stepped.r - expected.r) <= 1e-10);
    }
  }
}

TEST_CASE("with instant cumulation the new sigma path forgets the old one") {
  const int d = 3;
  const Hyperparameters hp = test_hp(d, Regime::NoSigmaPath);
  REQUIRE(hp.c_sigma == 1.0);
  const Objective f = make_sphere(Vector::Zero(d));
  const auto batch = draw_batch(hp, 42, 0);
  CounterRng rng(43, 0, 0);
  NormalizedState a =
      cma::test::random_normalized_state(rng, d, NormalizationFn::det_root());
  NormalizedState b = a;
  b.p = random_vector(rng, d);
  const NormalizedState na = step_normalized(a, hp, f, batch);
  const NormalizedState nb = step_normalized(b, hp, f, batch);
  CHECK((na.p - nb.p).norm() == 0.0);
  CHECK((na.z - nb.z).norm() == 0.0);
}

TEST_CASE("the smooth reparametrization round-trips") {
  CounterRng rng(44, 0, 0);
  const NormalizationFn R = NormalizationFn::eigen(2);
  for (int trial = 0; trial < 50; ++trial) {
    const NormalizedState y = cma::test::random_normalized_state(rng, 3, R);
    const NormalizedState back = xi_inv(xi(y), R);
    CHECK((back.Sigma.mat() - y.Sigma.mat()).norm() < 1e-12);
    CHECK((back.z - y.z).norm() == 0.0);
    CHECK(back.r == y.r);
    CHECK(std::abs(rho(xi(y).Sigma_hat) - 1.0) < 1e-12);
  }
}

TEST_CASE("xi_inv rescales by the requested eigenvalue") {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 2.0;
  s(1, 1) = 0.5;  // det^(1/2) = 1 already
  SmoothState x{Vector::Zero(2), Vector::Zero(2), Vector::Zero(2),
                SpdMatrix(s), 1.0};
  const NormalizedState y = xi_inv(x, NormalizationFn::eigen(2));
  // R = smallest eigenvalue = 1/2, so Sigma = 2 * Sigma_hat.
  CHECK(y.Sigma.mat()(0, 0) == doctest::Approx(4.0).epsilon(1e-12));
  CHECK(y.Sigma.mat()(1, 1) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("normalized and smooth chains are conjugate step by step") {
  const int d = 3;
  for (const NormalizationFn& R :
       {NormalizationFn::det_root(), NormalizationFn::eigen(1)}) {
    Hyperparameters hp = test_hp(d);
    hp.normalization = R;
    hp.finalize();
    const Objective f = make_sphere(Vector::Zero(d));
    CounterRng rng(45, 0, 0);
    NormalizedState y = cma::test::random_normalized_state(rng, d, R);
    for (int t = 0; t < 300; ++t) {
      const auto batch = draw_batch(hp, 46, t);
      const SmoothState via_smooth = step_smooth(xi(y), hp, f, batch);
      y = step_normalized(y, hp, f, batch);
      const SmoothState via_norm = xi(y);
      CHECK((via_smooth.z - via_norm.z).norm() <= 1e-10 * (1.0 + via_norm.z.norm()));
      CHECK((via_smooth.Sigma_hat.mat() - via_norm.Sigma_hat.mat()).norm() <=
            1e-10);
      CHECK(std::abs(via_smooth.r - via_norm.r) <= 1e-10 * (1.0 + via_norm.r));
      CHECK(std::abs(rho(via_smooth.Sigma_hat) - 1.0) < 1e-9);
    }
  }
}

TEST_CASE("the selection map returns the mu best scaled columns") {
  const int d = 2;
  Hyperparameters hp = test_hp(d);
  const Objective f = make_sphere(Vector::Zero(d));
  SmoothState x = SmoothState::attractor(hp);
  const auto batch = draw_batch(hp, 47, 0);
  const Matrix v = alpha_theta(x, hp, f, batch);
  REQUIRE(v.cols() == hp.mu);
  REQUIRE(v.rows() == d);
  // Sigma_hat = I at the attractor, so columns are the ranked raw draws.
  std::vector<double> fv;
  for (const Vector& u : batch) fv.push_back(f(x.z + u));
  const RankingPermutation s = rank_by_values(fv);
  for (int i = 0; i < hp.mu; ++i) {
    CHECK((v.col(i) - batch[s.order[i]]).norm() < 1e-14);
  }

  CHECK((f_theta(x, hp, v).z - step_smooth(x, hp, f, batch).z).norm() == 0.0);
}

TEST_CASE("dropping frozen coordinates commutes with the step exactly") {
  const int d = 3;
  const Objective f = make_norm1(Vector::Zero(d));
  const Regime regimes[] = {Regime::NoSigmaPath, Regime::NoCovPath,
                            Regime::NoPaths};
  for (const Regime regime : regimes) {
    const Hyperparameters hp = test_hp(d, regime);
    CounterRng rng(48, 0, 0);
    SmoothState x = random_smooth_state(rng, d);
    ProjectedState px = project(x, hp, regime);
    for (int t = 0; t < 200; ++t) {
      const auto batch = draw_batch(hp, 49, t);
      x = step_smooth(x, hp, f, batch);
      px = step_projected(px, hp, f, batch);
      const ProjectedState expected = project(x, hp, regime);
      CHECK((px.z - expected.z).norm() == 0.0);
      CHECK((px.Sigma_hat.mat() - expected.Sigma_hat.mat()).norm() == 0.0);
      if (regime == Regime::NoCovPath) {
        CHECK((px.p.value() - expected.p.value()).norm() == 0.0);
      }
      if (regime == Regime::NoSigmaPath) {
        CHECK((px.q.value() - expected.q.value()).norm() == 0.0);
        CHECK(px.r.value() == expected.r.value());
      }
    }
  }
}

TEST_CASE("projection rejects mismatched regimes") {
  const int d = 2;
  const Hyperparameters full = test_hp(d);
  SmoothState x = SmoothState::attractor(full);
  CHECK_THROWS_AS(project(x, full, Regime::NoSigmaPath), RegimeMismatchError);
  CHECK_THROWS_AS(project(x, full, Regime::Full), RegimeMismatchError);
  const Hyperparameters no_sigma = test_hp(d, Regime::NoSigmaPath);
  CHECK_THROWS_AS(project(x, no_sigma, Regime::NoPaths), RegimeMismatchError);
}

TEST_CASE("steps are deterministic functions of the batch") {
  const int d = 3;
  const Hyperparameters hp = test_hp(d);
  const Objective f = make_sphere(Vector::Zero(d));
  CounterRng rng(50, 0, 0);
  const SmoothState x = random_smooth_state(rng, d);
  const auto batch = draw_batch(hp, 51, 0);
  const SmoothState a = step_smooth(x, hp, f, batch);
  const SmoothState b = step_smooth(x, hp, f, batch);
  CHECK((a.z - b.z).norm() == 0.0);
  CHECK((a.Sigma_hat.mat() - b.Sigma_hat.mat()).norm() == 0.0);
  CHECK(a.r == b.r);
}

TEST_CASE("the smooth chain is blind to rescaling the problem") {
  // Replacing f by x -> f(x / gamma) and the optimum by gamma x* leaves the
  // chain unchanged; power-of-two gamma makes the float ordering exact.
  const int d = 3;
  const Hyperparameters hp = test_hp(d);
  const Vector xstar = Vector::Ones(d);
  const Objective f = make_sphere(xstar);
  CounterRng rng(52, 0, 0);

  for (int trial = 0; trial < 20; ++trial) {
    const int e = static_cast<int>(rng.next_double() * 8) - 4;
    const double gamma = std::ldexp(1.0, e);
    Objective g = f;
    g.optimum = gamma * xstar;
    g.evaluate = [f, gamma](const Vector& x) { return f(x / gamma); };
    SmoothState x = random_smooth_state(rng, d);
    const auto batch = draw_batch(hp, 53, trial);
    const SmoothState a = step_smooth(x, hp, f, batch);
    const SmoothState b = step_smooth(x, hp, g, batch);
    CHECK((a.z - b.z).norm() == 0.0);
    CHECK((a.Sigma_hat.mat() - b.Sigma_hat.mat()).norm() == 0.0);
    CHECK(a.r == b.r);
  }
}
