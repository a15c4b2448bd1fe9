#include "cma/hyperparameters.hpp"

#include <cmath>

#include "cma/errors.hpp"
#include "cma/sampling.hpp"

namespace cma {

std::string regime_name(Regime r) {
  switch (r) {
    case Regime::Full: return "i";
    case Regime::NoSigmaPath: return "ii";
    case Regime::NoCovPath: return "iii";
    case Regime::NoPaths: return "iv";
  }
  throw ConfigError("invalid regime enum");
}

Regime regime_from_name(const std::string& name) {
  if (name == "i") return Regime::Full;
  if (name == "ii") return Regime::NoSigmaPath;
  if (name == "iii") return Regime::NoCovPath;
  if (name == "iv") return Regime::NoPaths;
  throw ConfigError("unknown regime: " + name + " (expected i, ii, iii, iv)");
}

namespace {

void check_weights(const Vector& w, int mu, const std::string& label) {
  if (static_cast<int>(w.size()) != mu) {
    throw ConfigError(label + " must have length mu");
  }
  double sum = 0.0;
  for (int i = 0; i < mu; ++i) {
    if (!(w(i) > 0.0)) throw ConfigError(label + " must be strictly positive");
    if (i > 0 && w(i) > w(i - 1) + 1e-15) {
      throw ConfigError(label + " must be nonincreasing");
    }
    sum += w(i);
  }
  if (std::abs(sum - 1.0) > 1e-10) {
    throw ConfigError(label + " must sum to 1 (got " + std::to_string(sum) + ")");
  }
}

}  // namespace

void Hyperparameters::finalize() {
  if (d < 1) throw ConfigError("d must be >= 1");
  if (lambda < 1) throw ConfigError("lambda must be >= 1");
  if (mu < 1 || mu > lambda) throw ConfigError("mu must satisfy 1 <= mu <= lambda");
  if (weights.size() == 0) {
    weights = Vector(mu);
    for (int i = 0; i < mu; ++i) {
      weights(i) = std::log((lambda + 1) / 2.0) - std::log(i + 1.0);
    }
    if (weights(mu - 1) <= 0.0) {
      throw ConfigError("default log-weights require mu <= (lambda+1)/2");
    }
    weights /= weights.sum();
  }
  if (cov_weights.size() == 0) cov_weights = weights;
  mu_eff = 1.0 / weights.squaredNorm();
  if (d_sigma <= 0.0) {
    d_sigma = gamma_variant == GammaVariant::CSA1
                  ? 1.0 + 2.0 * std::sqrt(mu_eff / d)
                  : 1.0 + 2.0 * mu_eff / d;
  }
  validate();
}

void Hyperparameters::validate() const {
  check_weights(weights, mu, "weights");
  check_weights(cov_weights, mu, "cov_weights");
  if (!(c_m > 0.0)) throw ConfigError("c_m must be > 0");
  if (!(c_sigma > 0.0 && c_sigma <= 1.0)) throw ConfigError("c_sigma must be in (0, 1]");
  if (!(c_c > 0.0 && c_c <= 1.0)) throw ConfigError("c_c must be in (0, 1]");
  if (c_1 < 0.0 || c_mu < 0.0) throw ConfigError("c_1 and c_mu must be >= 0");
  const double cs = c_1 + c_mu;
  if (!(cs > 0.0 && cs < 1.0)) {
    throw ConfigError("c_1 + c_mu must lie strictly between 0 and 1 (got " +
                      std::to_string(cs) + ")");
  }
  if (!(d_sigma > 0.0)) throw ConfigError("d_sigma must be > 0");
}

Regime Hyperparameters::regime() const {
  const bool sig = c_sigma >= 1.0;
  const bool cov = c_c >= 1.0;
  if (sig && cov) return Regime::NoPaths;
  if (sig) return Regime::NoSigmaPath;
  if (cov) return Regime::NoCovPath;
  return Regime::Full;
}

double Hyperparameters::gamma(const Vector& p) const {
  if (gamma_variant == GammaVariant::CSA1) {
    return std::exp(c_sigma / d_sigma * (p.norm() / gaussian_mean_norm(d) - 1.0));
  }
  return std::exp(c_sigma / (2.0 * d_sigma) * (p.squaredNorm() / d - 1.0));
}

Hyperparameters default_hyperparameters(int d, GammaVariant variant) {
  Hyperparameters hp;
  hp.d = d;
  hp.lambda = 4 + static_cast<int>(3.0 * std::log(static_cast<double>(d)));
  hp.mu = hp.lambda / 2;
  hp.gamma_variant = variant;
  // conventional rate defaults, all strictly inside (0,1) so the
  // configuration sits in the fully-cumulated regime
  Vector w(hp.mu);
  for (int i = 0; i < hp.mu; ++i) {
    w(i) = std::log((hp.lambda + 1) / 2.0) - std::log(i + 1.0);
  }
  w /= w.sum();
  const double mu_eff = 1.0 / w.squaredNorm();
  hp.c_sigma = (mu_eff + 2.0) / (d + mu_eff + 5.0);
  hp.c_c = (4.0 + mu_eff / d) / (d + 4.0 + 2.0 * mu_eff / d);
  hp.c_1 = 2.0 / ((d + 1.3) * (d + 1.3) + mu_eff);
  hp.c_mu = std::min(1.0 - hp.c_1 - 1e-3,
                     2.0 * (mu_eff - 2.0 + 1.0 / mu_eff) /
                         ((d + 2.0) * (d + 2.0) + mu_eff));
  if (hp.c_mu <= 0.0) hp.c_mu = 1e-3;
  hp.d_sigma = 0.0;  // filled per variant in finalize()
  hp.finalize();
  return hp;
}

}  // namespace cma
