#pragma once

#include <string>

#include "cma/spd.hpp"

namespace cma {

enum class GammaVariant { CSA1, CSA2 };

/// Algorithm regimes distinguished by which evolution paths are cumulated.
enum class Regime {
  Full,       // c_sigma < 1, c_c < 1
  NoSigmaPath,  // c_sigma = 1
  NoCovPath,    // c_c = 1
  NoPaths       // c_sigma = c_c = 1
};

std::string regime_name(Regime r);
Regime regime_from_name(const std::string& name);

/// Full parameter set of one algorithm instance plus the normalization used
/// by its normalized chain. Validation enforces the standing assumptions:
/// weights positive, nonincreasing, summing to one; learning rates in (0, 1];
/// 0 < c_1 + c_mu < 1.
struct Hyperparameters {
  int d = 0;
  int lambda = 0;
  int mu = 0;
  Vector weights;      // selection weights, size mu
  Vector cov_weights;  // rank-mu update weights, size mu
  double c_m = 1.0;
  double c_sigma = 0.0;
  double c_c = 0.0;
  double c_1 = 0.0;
  double c_mu = 0.0;
  double d_sigma = 1.0;
  GammaVariant gamma_variant = GammaVariant::CSA1;
  NormalizationFn normalization = NormalizationFn::det_root();

  double mu_eff = 0.0;  // 1 / ||weights||^2, set by finalize()

  /// Derives mu_eff, fills unset defaults, validates; throws ConfigError.
  void finalize();
  void validate() const;

  Regime regime() const;

  /// Step-size multiplier Gamma(p) for a path p of dimension d.
  double gamma(const Vector& p) const;
};

/// Default configuration for dimension d: lambda = 4 + floor(3 ln d),
/// mu = lambda / 2, log-linear weights, standard cumulation constants.
Hyperparameters default_hyperparameters(int d, GammaVariant variant = GammaVariant::CSA1);

}  // namespace cma
