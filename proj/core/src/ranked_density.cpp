#include "cma/ranked_density.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cma/errors.hpp"

namespace cma {

namespace {

double log_falling_factorial(int lambda, int mu) {
  double out = 0.0;
  for (int k = lambda; k > lambda - mu; --k) out += std::log(static_cast<double>(k));
  return out;
}

}  // namespace

RankedDensityContext::RankedDensityContext(const Vector& z, const SpdMatrix& Sigma,
                                           const Objective& f,
                                           const SampleDistribution& dist,
                                           int lambda, int mu, int n_q,
                                           std::uint64_t seed)
    : z_(z),
      Sigma_(Sigma),
      sqrt_sigma_(Sigma.sqrt().mat()),
      inv_sqrt_sigma_(Sigma.inv_sqrt().mat()),
      det_sqrt_sigma_(std::sqrt(std::pow(Sigma.det_root(), Sigma.dim()))),
      f_(f),
      dist_(dist),
      lambda_(lambda),
      mu_(mu) {
  if (mu_ < 1 || mu_ > lambda_) throw ConfigError("need 1 <= mu <= lambda");
  if (n_q < 1000) throw ConfigError("N_q must be at least 1000");
  CounterRng rng(seed, /*chain=*/0x71e5, /*step=*/0);
  f_samples_.resize(n_q);
  for (int j = 0; j < n_q; ++j) {
    f_samples_[j] = f_at(dist_.sample(rng));
  }
  std::sort(f_samples_.begin(), f_samples_.end());
}

double RankedDensityContext::f_at(const Vector& u) const {
  return f_(f_.optimum + z_ + sqrt_sigma_ * u);
}

QEstimate RankedDensityContext::q_exceed(const Vector& u) const {
  const double level = f_at(u);
  const auto below =
      std::lower_bound(f_samples_.begin(), f_samples_.end(), level);
  const double n = static_cast<double>(f_samples_.size());
  QEstimate est;
  est.value = static_cast<double>(below - f_samples_.begin()) / n;
  est.stderr_value = std::sqrt(est.value * (1.0 - est.value) / n);
  return est;
}

double RankedDensityContext::density(const Matrix& v) const {
  if (static_cast<int>(v.cols()) != mu_) {
    throw ConfigError("density expects mu column vectors");
  }
  double prev = -std::numeric_limits<double>::infinity();
  double log_prod = 0.0;
  for (int i = 0; i < mu_; ++i) {
    const double fv = f_at(v.col(i));
    if (!(fv > prev)) return 0.0;  // strict-ordering indicator
    prev = fv;
    log_prod += dist_.log_density(v.col(i));
  }
  const double q_tail = 1.0 - q_exceed(v.col(mu_ - 1)).value;
  if (lambda_ > mu_ && q_tail <= 0.0) return 0.0;
  const double log_dens = log_falling_factorial(lambda_, mu_) + log_prod +
                          (lambda_ - mu_) * std::log(q_tail > 0.0 ? q_tail : 1.0);
  return std::exp(log_dens);
}

double RankedDensityContext::density_alpha(const Matrix& v) const {
  Matrix back = inv_sqrt_sigma_ * v;
  // sqrt(Sigma) acts on each of the mu blocks, so the change-of-variables
  // factor is det(Sigma)^(mu/2)
  return density(back) / std::pow(det_sqrt_sigma_, mu_);
}

double path_log_density(const SmoothState& theta0, const Hyperparameters& hp,
                        const Objective& f, const SampleDistribution& dist,
                        const std::vector<Matrix>& path, int n_q,
                        std::uint64_t seed) {
  SmoothState state = theta0;
  double total = 0.0;
  for (std::size_t t = 0; t < path.size(); ++t) {
    const SpdMatrix Sigma(state.Sigma_hat.mat() /
                          hp.normalization(state.Sigma_hat));
    RankedDensityContext ctx(state.z, Sigma, f, dist, hp.lambda, hp.mu, n_q,
                             seed + t);
    const double dens = ctx.density_alpha(path[t]);
    if (dens <= 0.0) return -std::numeric_limits<double>::infinity();
    total += std::log(dens);
    state = f_theta(state, hp, path[t]);
  }
  return total;
}

}  // namespace cma
