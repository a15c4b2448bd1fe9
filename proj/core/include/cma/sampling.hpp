#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "cma/spd.hpp"

namespace cma {

/// Counter-based generator: the stream is fully determined by
/// (seed, chain id, time step), so parallel replicas and co-run chain
/// simulations draw identical values without sharing state.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t chain, std::uint64_t step);

  std::uint64_t next_u64();
  /// Uniform in (0, 1), endpoints excluded.
  double next_double();
  /// Standard normal via Box-Muller.
  double next_gaussian();

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Sampling distribution for candidate inputs: isotropic, with a positive
/// continuous density and the norm moments the step-size update needs.
class SampleDistribution {
 public:
  virtual ~SampleDistribution() = default;
  virtual int dim() const = 0;
  virtual Vector sample(CounterRng& rng) const = 0;
  virtual double density(const Vector& u) const = 0;
  virtual double log_density(const Vector& u) const = 0;
  virtual double mean_norm() const = 0;     // E ||U||
  virtual double mean_sq_norm() const = 0;  // E ||U||^2
};

class GaussianDistribution final : public SampleDistribution {
 public:
  explicit GaussianDistribution(int dim);
  int dim() const override { return dim_; }
  Vector sample(CounterRng& rng) const override;
  double density(const Vector& u) const override;
  double log_density(const Vector& u) const override;
  double mean_norm() const override { return mean_norm_; }
  double mean_sq_norm() const override { return static_cast<double>(dim_); }

 private:
  int dim_;
  double mean_norm_;
};

/// E ||N(0, I_d)|| = sqrt(2) * Gamma((d+1)/2) / Gamma(d/2), via log-gamma.
double gaussian_mean_norm(int dim);

/// lambda i.i.d. draws; deterministic given the rng key.
std::vector<Vector> sample_batch(const SampleDistribution& dist, CounterRng& rng,
                                 int lambda);

}  // namespace cma
