#pragma once

#include <Eigen/Dense>
#include <vector>

#include "cma/hyperparameters.hpp"
#include "cma/normalized_chain.hpp"
#include "cma/spd.hpp"

namespace cma {

/// Deterministic input sequence; each step is a d x mu block fed to the
/// transition in place of the selected sample.
using ControlPath = std::vector<Matrix>;

/// Replicates one vector over all mu columns; such constant blocks lie in
/// the closure of the control sets.
Matrix replicate_block(const Vector& u, int mu);

/// Deterministic k-step flow; returns the k+1 visited states (including the
/// start).
std::vector<SmoothState> extended_transition(const SmoothState& theta0,
                                             const Hyperparameters& hp,
                                             const ControlPath& path);

/// Single input block reaching z = 0 in one step: all columns -z0/c_m.
ControlPath path_zero_mean(const SmoothState& theta0, const Hyperparameters& hp);

/// Two steps: push the mean by u1, then cancel the displacement; ends with
/// z = 0 for any u1.
ControlPath path_return_zero_mean(const SmoothState& theta0,
                                  const Hyperparameters& hp, const Vector& u1);

/// Two steps ending with z = 0 and q = 0; the push size along q0 is found by
/// bracketed root-finding on the (scalar) coefficient of q0 in the final q.
ControlPath path_zero_q(const SmoothState& theta0, const Hyperparameters& hp);

/// Four steps ending with z = q = 0 and the k-th eigenvalue of Sigma_hat
/// raised to the (k-1)-th (1-based, descending order); nested root-finding:
/// the inner scalar zeroes the final q, the outer one matches the
/// eigenvalue gap. Requires eigenvalue k-1 >= eigenvalue k at the start and
/// z0 = q0 = 0.
ControlPath path_equalize_eigen(const SmoothState& theta0,
                                const Hyperparameters& hp, int k);

/// Steers to (0, ~0, 0, I_d, 1-c_1-c_mu): zero the mean and q, equalize all
/// eigenvalues pairwise, then decay p with zero inputs (p shrinks by
/// 1-c_sigma per tail step; every other coordinate is exact up to the stated
/// tolerances).
ControlPath path_to_identity(const SmoothState& theta0, const Hyperparameters& hp,
                             int zero_tail_steps = 30);

/// Steers to z = q = 0 and Sigma_hat = target (rho(target) = 1 required):
/// first to the identity, then one 4-step block per eigendirection of the
/// target, processed in ascending eigenvalue order against the smallest one.
ControlPath path_to_target_sigma(const SmoothState& theta0,
                                 const Hyperparameters& hp,
                                 const SpdMatrix& target,
                                 int zero_tail_steps = 30);

struct JacobianReport {
  Matrix jacobian;  // flattened endpoint state x path inputs
  std::vector<double> singular_values;  // descending
  int rank = 0;
  int max_rank = 0;  // 3d + d(d+1)/2: full tangent dimension
  double threshold = 1e-8;
  double fd_step = 0.0;
};

/// Central finite differences of the endpoint of the flow with respect to
/// every path input; the Sigma_hat rows are projected onto the tangent space
/// of the rho = 1 manifold before the singular values are taken.
JacobianReport jacobian_fd(const SmoothState& theta0, const Hyperparameters& hp,
                           const ControlPath& path, double h = 1e-6);

struct LpqResult {
  Eigen::Matrix2d a_j;
  double det_a_j = 0.0;
  double limit = 0.0;  // determinant limit as j grows
};

/// The 2x2 reduced controllability matrix A_j built from Gamma evaluated
/// along the decaying path (1-c_sigma)^k p, and the closed-form limit of its
/// determinant. The limit vanishes exactly when
/// 1 - c_c = (1 - c_sigma) sqrt(1 - c_1 - c_mu).
LpqResult lpq_determinant(int j, const Hyperparameters& hp, const Vector& p);

}  // namespace cma
