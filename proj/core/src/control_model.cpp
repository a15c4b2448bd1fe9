#include "cma/control_model.hpp"

#include <Eigen/SVD>
#include <cmath>

#include "cma/errors.hpp"
#include "cma/root_finding.hpp"

namespace cma {

namespace {

constexpr double kZeroTol = 1e-9;

Matrix zero_block(const Hyperparameters& hp) { return Matrix::Zero(hp.d, hp.mu); }

void require_zero_mean(const SmoothState& state, const char* who) {
  if (state.z.norm() > kZeroTol * (1.0 + state.z.norm())) {
    throw ConfigError(std::string(who) + " requires z = 0 at the start");
  }
}

/// Push the mean by u, then cancel the displacement (two blocks); the
/// cancellation scale is read off the intermediate state.
ControlPath push_return(const SmoothState& theta0, const Hyperparameters& hp,
                        const Vector& u) {
  ControlPath path;
  path.push_back(replicate_block(u, hp.mu));
  const SmoothState t1 = f_theta(theta0, hp, path[0]);
  path.push_back(-(1.0 / (std::sqrt(t1.r) * hp.gamma(t1.p))) * path[0]);
  return path;
}

SmoothState advance(const SmoothState& theta0, const Hyperparameters& hp,
                    const ControlPath& path) {
  SmoothState s = theta0;
  for (const Matrix& v : path) s = f_theta(s, hp, v);
  return s;
}

void append(ControlPath& into, const ControlPath& piece) {
  into.insert(into.end(), piece.begin(), piece.end());
}

/// Finds the smallest-|kappa| root of g on the given side of 0 by doubling
/// away from the origin until the sign flips, then bisecting.
double root_from_zero(const std::function<double(double)>& g, double direction) {
  const double g0 = g(0.0);
  if (g0 == 0.0) return 0.0;
  double inner = 0.0;
  double outer = direction;
  int expansions = 0;
  while (std::signbit(g(outer)) == std::signbit(g0)) {
    inner = outer;
    outer *= 2.0;
    if (++expansions > 60) {
      throw BracketNotFoundError("no sign change within expansion budget");
    }
  }
  return find_root(g, std::min(inner, outer), std::max(inner, outer));
}

Vector flatten(const SmoothState& s) {
  const int d = static_cast<int>(s.z.size());
  Vector out(3 * d + d * (d + 1) / 2 + 1);
  int at = 0;
  out.segment(at, d) = s.z;
  at += d;
  out.segment(at, d) = s.p;
  at += d;
  out.segment(at, d) = s.q;
  at += d;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) out(at++) = s.Sigma_hat.mat()(i, j);
  }
  out(at) = s.r;
  return out;
}

Matrix unflatten_sigma_part(const Vector& col, int d) {
  Matrix h = Matrix::Zero(d, d);
  int at = 3 * d;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) {
      h(i, j) = col(at);
      h(j, i) = col(at);
      ++at;
    }
  }
  return h;
}

void write_sigma_part(Vector& col, const Matrix& h, int d) {
  int at = 3 * d;
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j <= i; ++j) col(at++) = h(i, j);
  }
}

}  // namespace

Matrix replicate_block(const Vector& u, int mu) {
  Matrix v(u.size(), mu);
  for (int i = 0; i < mu; ++i) v.col(i) = u;
  return v;
}

std::vector<SmoothState> extended_transition(const SmoothState& theta0,
                                             const Hyperparameters& hp,
                                             const ControlPath& path) {
  std::vector<SmoothState> states;
  states.reserve(path.size() + 1);
  states.push_back(theta0);
  for (const Matrix& v : path) states.push_back(f_theta(states.back(), hp, v));
  return states;
}

ControlPath path_zero_mean(const SmoothState& theta0, const Hyperparameters& hp) {
  return {replicate_block(-theta0.z / hp.c_m, hp.mu)};
}

ControlPath path_return_zero_mean(const SmoothState& theta0,
                                  const Hyperparameters& hp, const Vector& u1) {
  require_zero_mean(theta0, "path_return_zero_mean");
  return push_return(theta0, hp, u1);
}

ControlPath path_zero_q(const SmoothState& theta0, const Hyperparameters& hp) {
  require_zero_mean(theta0, "path_zero_q");
  if (hp.c_c >= 1.0) {
    throw RegimeMismatchError("path_zero_q needs c_c < 1");
  }
  const Vector q0 = theta0.q;
  const double q0_norm = q0.norm();
  if (q0_norm == 0.0) return {zero_block(hp), zero_block(hp)};

  auto coeff = [&](double kappa) {
    const ControlPath two = push_return(theta0, hp, kappa * q0);
    const SmoothState end = advance(theta0, hp, two);
    return end.q.dot(q0) / (q0_norm * q0_norm);
  };
  // Prefer the root nearest to kappa = 0 (the push then stays O(|q0|) and
  // the whole path depends continuously on the start); the local slope says
  // on which side it lies. If that side has none, the Gamma growth for
  // large negative pushes still guarantees one on the other side.
  const double c0 = coeff(0.0);
  const double delta = 1e-3;
  const double slope = (coeff(delta) - coeff(-delta)) / (2.0 * delta);
  const double direction = slope * c0 < 0.0 ? 1.0 : -1.0;
  double kappa;
  try {
    kappa = root_from_zero(coeff, direction);
  } catch (const BracketNotFoundError&) {
    kappa = root_from_zero(coeff, -direction);
  } catch (const NonSpdError&) {
    // the bracket search outgrew the representable covariance range on this
    // side without a sign change
    kappa = root_from_zero(coeff, -direction);
  }
  return push_return(theta0, hp, kappa * q0);
}

ControlPath path_equalize_eigen(const SmoothState& theta0,
                                const Hyperparameters& hp, int k) {
  require_zero_mean(theta0, "path_equalize_eigen");
  if (k < 2 || k > hp.d) throw IndexOutOfRangeError("eigen index must be in 2..d");
  if (theta0.q.norm() > kZeroTol) {
    throw ConfigError("path_equalize_eigen requires q = 0 at the start");
  }
  const Vector& lam = theta0.Sigma_hat.eigenvalues();
  const Vector b_hi = theta0.Sigma_hat.eigenvectors().col(k - 2);
  const Vector b_lo = theta0.Sigma_hat.eigenvectors().col(k - 1);

  if (lam(k - 2) - lam(k - 1) <= 1e-14 * lam(0)) {
    ControlPath path = push_return(theta0, hp, 0.0 * b_lo);
    const SmoothState mid = advance(theta0, hp, path);
    append(path, path_zero_q(mid, hp));
    return path;
  }

  // One root-find can fall short: the inner q-cancellation switches branches
  // at some push size, so the reachable gap values jump past zero there and
  // the bisection stops at the jump. Each round still closes a fixed
  // fraction of the spread, so iterate. Only the lagging direction is ever
  // pushed; everything else then changes by a common factor, which keeps
  // previously equalized pairs equal.
  ControlPath path;
  SmoothState state = theta0;
  for (int round = 0; round < 40; ++round) {
    const double s_lo = b_lo.dot(state.Sigma_hat.mat() * b_lo);
    const double s_hi = b_hi.dot(state.Sigma_hat.mat() * b_hi);
    if (round > 0 &&
        std::abs(s_lo - s_hi) <= 1e-11 * std::max(s_lo, s_hi)) {
      return path;
    }
    auto block_for = [&](double kappa) {
      ControlPath block = push_return(state, hp, kappa * b_lo);
      const SmoothState mid = advance(state, hp, block);
      append(block, path_zero_q(mid, hp));
      return block;
    };
    auto gap = [&](double kappa) {
      const SmoothState end = advance(state, hp, block_for(kappa));
      const double s_push = b_lo.dot(end.Sigma_hat.mat() * b_lo);
      const double s_ref = b_hi.dot(end.Sigma_hat.mat() * b_hi);
      return (s_push - s_ref) / s_ref;
    };
    double kappa = root_from_zero(gap, 1.0);
    // if the bisection stopped just past the jump, step back onto the
    // continuous side so the round never overshoots
    double back = 1e-12 * kappa;
    while (kappa > 0.0 && gap(kappa) > 1e-11) {
      kappa = std::max(0.0, kappa - back);
      back *= 2.0;
    }
    const ControlPath block = block_for(kappa);
    append(path, block);
    state = advance(state, hp, block);
  }
  throw BracketNotFoundError("eigenvalue equalization did not converge");
}

namespace {

/// Zero mean, zero q, then equalize eigenvalues pairwise; ends with
/// z = q = 0 and Sigma_hat = I (no p-decay tail).
ControlPath steer_to_identity_core(const SmoothState& theta0,
                                   const Hyperparameters& hp,
                                   SmoothState* end_state) {
  ControlPath path = path_zero_mean(theta0, hp);
  SmoothState state = advance(theta0, hp, path);
  append(path, path_zero_q(state, hp));
  state = advance(theta0, hp, path);
  for (int k = 2; k <= hp.d; ++k) {
    const ControlPath block = path_equalize_eigen(state, hp, k);
    append(path, block);
    state = advance(state, hp, block);
  }
  if (end_state) *end_state = state;
  return path;
}

}  // namespace

ControlPath path_to_identity(const SmoothState& theta0, const Hyperparameters& hp,
                             int zero_tail_steps) {
  if (hp.regime() != Regime::Full) {
    throw RegimeMismatchError("steering paths need c_sigma < 1 and c_c < 1");
  }
  ControlPath path = steer_to_identity_core(theta0, hp, nullptr);
  for (int t = 0; t < zero_tail_steps; ++t) path.push_back(zero_block(hp));
  // the weighted-sum rounding left by path_zero_mean gets amplified by the
  // contracting tail (1/(sqrt(r) Gamma) > 1); cancel it once more at the end
  append(path, path_zero_mean(advance(theta0, hp, path), hp));
  return path;
}

ControlPath path_to_target_sigma(const SmoothState& theta0,
                                 const Hyperparameters& hp,
                                 const SpdMatrix& target, int zero_tail_steps) {
  if (hp.regime() != Regime::Full) {
    throw RegimeMismatchError("steering paths need c_sigma < 1 and c_c < 1");
  }
  if (std::abs(rho(target) - 1.0) > 1e-9) {
    throw ConfigError("target covariance must have unit rho");
  }
  SmoothState state = theta0;
  ControlPath path = steer_to_identity_core(theta0, hp, &state);

  const Vector& mu_target = target.eigenvalues();  // descending
  const Matrix& basis = target.eigenvectors();
  const int ref = hp.d - 1;  // smallest target eigenvalue, never pushed
  // raise coordinates one by one, smallest target ratio first; each block
  // only moves its own direction relative to the rest
  for (int j = hp.d - 2; j >= 0; --j) {
    const Vector b_j = basis.col(j);
    const Vector b_ref = basis.col(ref);
    const double want = mu_target(j) / mu_target(ref);

    auto block_for = [&](double kappa) {
      ControlPath block = push_return(state, hp, kappa * b_j);
      const SmoothState mid = advance(state, hp, block);
      append(block, path_zero_q(mid, hp));
      return block;
    };
    auto ratio_gap = [&](double kappa) {
      const SmoothState end = advance(state, hp, block_for(kappa));
      const double s_j = b_j.dot(end.Sigma_hat.mat() * b_j);
      const double s_ref = b_ref.dot(end.Sigma_hat.mat() * b_ref);
      return s_j / s_ref - want;
    };

    const double kappa = ratio_gap(0.0) >= 0.0 ? 0.0 : root_from_zero(ratio_gap, 1.0);
    const ControlPath block = block_for(kappa);
    append(path, block);
    state = advance(state, hp, block);
  }
  for (int t = 0; t < zero_tail_steps; ++t) path.push_back(zero_block(hp));
  append(path, path_zero_mean(advance(theta0, hp, path), hp));
  return path;
}

JacobianReport jacobian_fd(const SmoothState& theta0, const Hyperparameters& hp,
                           const ControlPath& path, double h) {
  JacobianReport report;
  report.fd_step = h;
  report.max_rank = 3 * hp.d + hp.d * (hp.d + 1) / 2;
  const int state_dim = 3 * hp.d + hp.d * (hp.d + 1) / 2 + 1;
  const int n_inputs = static_cast<int>(path.size()) * hp.d * hp.mu;
  report.jacobian = Matrix::Zero(state_dim, n_inputs);
  if (n_inputs == 0) return report;

  const SmoothState endpoint = advance(theta0, hp, path);
  const SpdMatrix& sigma_end = endpoint.Sigma_hat;

  int col = 0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    for (int jcol = 0; jcol < hp.mu; ++jcol) {
      for (int i = 0; i < hp.d; ++i, ++col) {
        const double step = h * (1.0 + std::abs(path[t](i, jcol)));
        ControlPath perturbed = path;
        perturbed[t](i, jcol) += step;
        const Vector plus = flatten(advance(theta0, hp, perturbed));
        perturbed[t](i, jcol) -= 2.0 * step;
        const Vector minus = flatten(advance(theta0, hp, perturbed));
        Vector column = (plus - minus) / (2.0 * step);
        // keep only the component tangent to the rho = 1 manifold
        const Matrix h_mat = unflatten_sigma_part(column, hp.d);
        const double normal = d_rho(sigma_end, h_mat) / rho(sigma_end);
        write_sigma_part(column, h_mat - normal * sigma_end.mat(), hp.d);
        report.jacobian.col(col) = column;
      }
    }
  }

  Eigen::JacobiSVD<Matrix> svd(report.jacobian);
  const Vector& sv = svd.singularValues();
  report.singular_values.assign(sv.data(), sv.data() + sv.size());
  const double top = report.singular_values.empty() ? 0.0 : report.singular_values[0];
  report.rank = 0;
  for (double s : report.singular_values) {
    if (top > 0.0 && s / top > report.threshold) ++report.rank;
  }
  return report;
}

LpqResult lpq_determinant(int j, const Hyperparameters& hp, const Vector& p) {
  if (hp.c_sigma >= 1.0 || hp.c_c >= 1.0) {
    throw RegimeMismatchError("lpq_determinant needs c_sigma < 1 and c_c < 1");
  }
  const double one_cs = 1.0 - hp.c_sigma;
  const double one_cc = 1.0 - hp.c_c;
  const double shrink = 1.0 - hp.c_1 - hp.c_mu;
  const double beta = 1.0 / std::sqrt(shrink);
  auto gamma_at = [&](int k) {
    return hp.gamma(std::pow(one_cs, static_cast<double>(k)) * p);
  };

  LpqResult out;
  const double g1 = gamma_at(j + 1);
  const double g3 = gamma_at(j + 3);
  out.a_j(0, 0) = one_cs * one_cs * (one_cs - beta / g1);
  out.a_j(0, 1) = one_cs - beta / g3;
  out.a_j(1, 0) = one_cc * one_cc / shrink * (one_cc - 1.0 / g1);
  out.a_j(1, 1) = one_cc - 1.0 / g3;
  out.det_a_j = out.a_j.determinant();

  const double g0 = hp.gamma(Vector::Zero(hp.d));
  out.limit = (one_cs - beta / g0) * (one_cc - 1.0 / g0) *
              (one_cs * one_cs - one_cc * one_cc / shrink);
  return out;
}

}  // namespace cma
