#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "cma/control_model.hpp"
#include "cma/errors.hpp"
#include "helpers.hpp"

using namespace cma;
using cma::test::random_smooth_state;
using cma::test::random_vector;
using cma::test::test_hp;

namespace {

SmoothState endpoint(const SmoothState& theta0, const Hyperparameters& hp,
                     const ControlPath& path) {
  return extended_transition(theta0, hp, path).back();
}

SmoothState zeroed_start(CounterRng& rng, const Hyperparameters& hp) {
  SmoothState s = random_smooth_state(rng, hp.d);
  s.z = Vector::Zero(hp.d);
  s.q = Vector::Zero(hp.d);
  return s;
}

}  // namespace

TEST_CASE("the flow with an empty path returns only the start") {
  const Hyperparameters hp = test_hp(2);
  CounterRng rng(61, 0, 0);
  const SmoothState theta0 = random_smooth_state(rng, 2);
  const auto states = extended_transition(theta0, hp, {});
  REQUIRE(states.size() == 1);
  CHECK((states[0].z - theta0.z).norm() == 0.0);
}

TEST_CASE("zero inputs freeze the covariance direction and decay the paths") {
  const int d = 3;
  const Hyperparameters hp = test_hp(d);
  CounterRng rng(62, 0, 0);
  SmoothState theta0 = random_smooth_state(rng, d);
  theta0.z = Vector::Zero(d);
  theta0.q = Vector::Zero(d);

  const ControlPath zeros(5, Matrix::Zero(d, hp.mu));
  const auto states = extended_transition(theta0, hp, zeros);
  REQUIRE(states.size() == 6);
  for (int t = 1; t <= 5; ++t) {
    const SmoothState& s = states[t];
    CHECK((s.p - std::pow(1.0 - hp.c_sigma, t) * theta0.p).norm() <
          1e-12 * (1.0 + theta0.p.norm()));
    CHECK(s.q.norm() < 1e-12);
    CHECK((s.Sigma_hat.mat() - theta0.Sigma_hat.mat()).norm() < 1e-10);
    CHECK(s.r == doctest::Approx(1.0 - hp.c_1 - hp.c_mu).epsilon(1e-12));
  }
}

TEST_CASE("the flow composes step by step") {
  const int d = 2;
  const Hyperparameters hp = test_hp(d);
  CounterRng rng(63, 0, 0);
  const SmoothState theta0 = random_smooth_state(rng, d);
  ControlPath path;
  for (int t = 0; t < 4; ++t) {
    Matrix block(d, hp.mu);
    for (int j = 0; j < hp.mu; ++j) block.col(j) = 0.3 * random_vector(rng, d);
    path.push_back(block);
  }
  const auto states = extended_transition(theta0, hp, path);
  SmoothState s = theta0;
  for (int t = 0; t < 4; ++t) {
    s = f_theta(s, hp, path[t]);
    CHECK((s.z - states[t + 1].z).norm() == 0.0);
    CHECK((s.Sigma_hat.mat() - states[t + 1].Sigma_hat.mat()).norm() == 0.0);
  }
}

TEST_CASE("one block cancels the mean exactly") {
  const int d = 4;
  const Hyperparameters hp = test_hp(d);
  CounterRng rng(64, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    const SmoothState theta0 = random_smooth_state(rng, d);
    const ControlPath path = path_zero_mean(theta0, hp);
    REQUIRE(path.size() == 1);
    const SmoothState end = endpoint(theta0, hp, path);
    CHECK(end.z.norm() < 1e-12 * (1.0 + theta0.z.norm()));
  }

  SmoothState at_zero = random_smooth_state(rng, d);
  at_zero.z = Vector::Zero(d);
  CHECK(endpoint(at_zero, hp, path_zero_mean(at_zero, hp)).z.norm() == 0.0);
}

TEST_CASE("push and return lands back on zero mean for any push") {
  const int d = 3;
  const Hyperparameters hp = test_hp(d);
  CounterRng rng(65, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    SmoothState theta0 = random_smooth_state(rng, d);
    theta0.z = Vector::Zero(d);
    const Vector u1 = random_vector(rng, d);
    const ControlPath path = path_return_zero_mean(theta0, hp, u1);
    REQUIRE(path.size() == 2);
    CHECK(endpoint(theta0, hp, path).z.norm() < 1e-12);
  }
}

TEST_CASE("push and return moves q by a known multiple in dimension one") {
  const int d = 1;
  const Hyperparameters hp = test_hp(d);
  CounterRng rng(66, 0, 0);
  SmoothState theta0 = zeroed_start(rng, hp);
  Vector u1(1);
  u1 << 0.7;
  const ControlPath path = path_return_zero_mean(theta0, hp, u1);
  const auto states = extended_transition(theta0, hp, path);

  // Both steps are constant blocks, so each q update is
  // q+ = (1-c_c) q / sqrt(r) + sqrt(c_c (2-c_c) mu_eff) sqrt(Sigma) w_sum.
  const double k = std::sqrt(hp.c_c * (2.0 - hp.c_c) * hp.mu_eff);
  Vector q = theta0.q;
  for (int t = 0; t < 2; ++t) {
    const SmoothState& s = states[t];
    Vector w_sum = Vector::Zero(d);
    for (int j = 0; j < hp.mu; ++j) w_sum += hp.weights(j) * path[t].col(j);
    // Path blocks already carry the sqrt(Sigma) scaling.
    q = (1.0 - hp.c_c) * q / std::sqrt(s.r) + k * w_sum;
    CHECK((states[t + 1].q - q).norm() < 1e-10 * (1.0 + q.norm()));
  }
}

TEST_CASE("two blocks cancel mean and covariance path together") {
  const int d = 3;
  const Hyperparameters hp = test_hp(d);
  CounterRng rng(67, 0, 0);
  for (int trial = 0; trial < 20; ++trial) {
    SmoothState theta0 = random_smooth_state(rng, d);
    theta0.z = Vector::Zero(d);
    const ControlPath path = path_zero_q(theta0, hp);
    REQUIRE(path.size() == 2);
    const SmoothState end = endpoint(theta0, hp, path);
    CHECK(end.z.norm() < 1e-12);
    CHECK(end.q.norm() < 1e-10 * (1.0 + theta0.q.norm()));
  }

  // Flipping the sign of q0 must still be handled.
  SmoothState theta0 = zeroed_start(rng, hp);
  theta0.q = random_vector(rng, d);
  SmoothState flipped = theta0;
  flipped.q = -theta0.q;
  CHECK(endpoint(theta0, hp, path_zero_q(theta0, hp)).q.norm() < 1e-10);
  CHECK(endpoint(flipped, hp, path_zero_q(flipped, hp)).q.norm() < 1e-10);

  // Already-zero q needs no push.
  SmoothState clean = zeroed_start(rng, hp);
  CHECK(endpoint(clean, hp, path_zero_q(clean, hp)).q.norm() < 1e-12);
}

TEST_CASE("four blocks raise one eigenvalue to its neighbor") {
  const int d = 2;
  const Hyperparameters hp = test_hp(d);
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = 2.0;
  s(1, 1) = 0.5;
  SmoothState theta0{Vector::Zero(2), Vector::Zero(2), Vector::Zero(2),
                     SpdMatrix(Matrix(s / rho(SpdMatrix(s)))), 1.0};
  const ControlPath path = path_equalize_eigen(theta0, hp, 2);
  REQUIRE(path.size() == 4);
  const SmoothState end = endpoint(theta0, hp, path);
  const Vector eig = end.Sigma_hat.eigenvalues();
  CHECK(std::abs(eig(0) - eig(1)) < 1e-8 * eig(0));
  CHECK(end.z.norm() < 1e-10);
  CHECK(end.q.norm() < 1e-8);
}

TEST_CASE("successive equalizations reach the identity covariance") {
  const int d = 3;
  const Hyperparameters hp = test_hp(d);
  CounterRng rng(68, 0, 0);
  SmoothState s = zeroed_start(rng, hp);
  s.p = Vector::Zero(d);
  for (int k = 2; k <= d; ++k) {
    const ControlPath path = path_equalize_eigen(s, hp, k);
    s = endpoint(s, hp, path);
  }
  CHECK((s.Sigma_hat.mat() - Matrix::Identity(d, d)).norm() < 1e-6);
}

TEST_CASE("equalization rejects an out-of-range eigenvalue index") {
  const Hyperparameters hp = test_hp(2);
  const SmoothState theta0 = SmoothState::attractor(hp);
  CHECK_THROWS_AS(path_equalize_eigen(theta0, hp, 1), IndexOutOfRangeError);
  CHECK_THROWS_AS(path_equalize_eigen(theta0, hp, 3), IndexOutOfRangeError);
}

TEST_CASE("the composite path steers any state to the attractor") {
  for (int d : {2, 3}) {
    const Hyperparameters hp = test_hp(d);
    const SmoothState target = SmoothState::attractor(hp);
    CounterRng rng(69, 0, 0);
    for (int trial = 0; trial < 5; ++trial) {
      const SmoothState theta0 = random_smooth_state(rng, d);
      const int tail = 40;
      const ControlPath path = path_to_identity(theta0, hp, tail);
      const SmoothState end = endpoint(theta0, hp, path);
      CHECK(end.z.norm() < 1e-12);
      CHECK(end.q.norm() < 1e-8);
      CHECK((end.Sigma_hat.mat() - Matrix::Identity(d, d)).norm() < 1e-6);
      CHECK(std::abs(end.r - target.r) < 1e-10);
      // The sigma path decays geometrically over the zero tail.
      CHECK(end.p.norm() < std::pow(1.0 - hp.c_sigma, tail) * 1e3);
    }
  }
}

TEST_CASE("steering to the identity needs both cumulation paths") {
  const Hyperparameters hp = test_hp(2, Regime::NoSigmaPath);
  const SmoothState theta0 = SmoothState::attractor(hp);
  CHECK_THROWS_AS(path_to_identity(theta0, hp), RegimeMismatchError);
}

TEST_CASE("the composite path reaches a prescribed covariance") {
  const int d = 2;
  const Hyperparameters hp = test_hp(d);
  Matrix t = Matrix::Zero(2, 2);
  t(0, 0) = 2.0;
  t(1, 1) = 0.5;
  const SpdMatrix target{t};
  CounterRng rng(70, 0, 0);
  const SmoothState theta0 = random_smooth_state(rng, d);
  const ControlPath path = path_to_target_sigma(theta0, hp, target, 40);
  const SmoothState end = endpoint(theta0, hp, path);
  CHECK((end.Sigma_hat.mat() - target.mat()).norm() < 1e-6 * target.mat().norm());
  CHECK(end.z.norm() < 1e-10);

  const SpdMatrix unscaled{Matrix(3.0 * Matrix::Identity(2, 2))};
  CHECK_THROWS_AS(path_to_target_sigma(theta0, hp, unscaled), ConfigError);
}

TEST_CASE("the empty path has a rank-zero sensitivity") {
  const Hyperparameters hp = test_hp(2);
  const SmoothState theta0 = SmoothState::attractor(hp);
  const JacobianReport rep = jacobian_fd(theta0, hp, {});
  CHECK(rep.rank == 0);
  CHECK(rep.jacobian.cols() == 0);
  CHECK(rep.max_rank == 3 * 2 + 2 * 3 / 2);
}

TEST_CASE("the sensitivity of a one-step flow matches a direct difference") {
  const int d = 2;
  const Hyperparameters hp = test_hp(d);
  CounterRng rng(71, 0, 0);
  const SmoothState theta0 = random_smooth_state(rng, d);
  Matrix block(d, hp.mu);
  for (int j = 0; j < hp.mu; ++j) block.col(j) = 0.2 * random_vector(rng, d);
  const JacobianReport rep = jacobian_fd(theta0, hp, {block}, 1e-6);
  REQUIRE(rep.jacobian.cols() == d * hp.mu);

  // Compare the z rows against a direct central difference in one input;
  // the step is scaled by the entry magnitude like the report's columns.
  ControlPath plus = {block}, minus = {block};
  const double h = rep.fd_step * (1.0 + std::abs(block(0, 0)));
  plus[0](0, 0) += h;
  minus[0](0, 0) -= h;
  const Vector dz = (endpoint(theta0, hp, plus).z -
                     endpoint(theta0, hp, minus).z) /
                    (2.0 * h);
  for (int i = 0; i < d; ++i) {
    CHECK(rep.jacobian(i, 0) == doctest::Approx(dz(i)).epsilon(1e-8));
  }
}

TEST_CASE("the sensitivity rank is stable across step sizes") {
  const int d = 2;
  const Hyperparameters hp = test_hp(d);
  CounterRng rng(72, 0, 0);
  const SmoothState theta0 = random_smooth_state(rng, d);
  ControlPath path = path_to_identity(theta0, hp, 5);
  for (int t = 0; t < 5; ++t) {
    Matrix block(d, hp.mu);
    for (int j = 0; j < hp.mu; ++j) block.col(j) = 1e-2 * random_vector(rng, d);
    path.push_back(block);
  }
  int ranks[3];
  int idx = 0;
  for (double h : {1e-5, 1e-6, 1e-7}) {
    ranks[idx++] = jacobian_fd(theta0, hp, path, h).rank;
  }
  CHECK(ranks[0] == ranks[1]);
  CHECK(ranks[1] == ranks[2]);
}

TEST_CASE("the reduced controllability determinant matches its limit") {
  const int d = 3;
  const Hyperparameters hp = test_hp(d);
  CounterRng rng(73, 0, 0);
  const Vector p = random_vector(rng, d);

  const LpqResult far = lpq_determinant(50, hp, p);
  CHECK(std::abs(far.det_a_j - far.limit) < 1e-6);
  CHECK(far.det_a_j == doctest::Approx(far.a_j.determinant()).epsilon(1e-12));

  // Gamma(0) < 1, so the diagonal entries of the limit factorization are
  // bounded away from the degenerate values.
  CHECK(hp.gamma(Vector::Zero(d)) < 1.0);
}

TEST_CASE("the determinant limit vanishes exactly at the degenerate coupling") {
  const int d = 2;
  Hyperparameters hp = test_hp(d);
  // Choose c_c so that 1 - c_c = (1 - c_sigma) sqrt(1 - c_1 - c_mu).
  hp.c_c = 1.0 - (1.0 - hp.c_sigma) * std::sqrt(1.0 - hp.c_1 - hp.c_mu);
  hp.finalize();
  const LpqResult res = lpq_determinant(10, hp, Vector::Zero(d));
  CHECK(std::abs(res.limit) < 1e-12);

  Hyperparameters generic = test_hp(d);
  CHECK(std::abs(lpq_determinant(10, generic, Vector::Zero(d)).limit) > 1e-6);
}

TEST_CASE("the reduced matrix is rejected without cumulation") {
  const Hyperparameters hp = test_hp(2, Regime::NoSigmaPath);
  CHECK_THROWS_AS(lpq_determinant(3, hp, Vector::Zero(2)), RegimeMismatchError);
}
