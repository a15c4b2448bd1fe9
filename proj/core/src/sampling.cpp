#include "cma/sampling.hpp"

#include <cmath>

namespace cma {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace

CounterRng::CounterRng(std::uint64_t seed, std::uint64_t chain, std::uint64_t step) {
  key_ = splitmix64(splitmix64(splitmix64(seed) ^ chain) ^ step);
}

std::uint64_t CounterRng::next_u64() {
  return splitmix64(key_ ^ splitmix64(counter_++ * 0xd1342543de82ef95ULL + 1));
}

double CounterRng::next_double() {
  // 53 random bits in (0,1); the +0.5 offset keeps the endpoints out.
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double CounterRng::next_gaussian() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = next_double();
  const double u2 = next_double();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  spare_ = radius * std::sin(kTwoPi * u2);
  has_spare_ = true;
  return radius * std::cos(kTwoPi * u2);
}

double gaussian_mean_norm(int dim) {
  return std::sqrt(2.0) *
         std::exp(std::lgamma((dim + 1) / 2.0) - std::lgamma(dim / 2.0));
}

GaussianDistribution::GaussianDistribution(int dim)
    : dim_(dim), mean_norm_(gaussian_mean_norm(dim)) {}

Vector GaussianDistribution::sample(CounterRng& rng) const {
  Vector u(dim_);
  for (int i = 0; i < dim_; ++i) u(i) = rng.next_gaussian();
  return u;
}

double GaussianDistribution::log_density(const Vector& u) const {
  constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
  return -0.5 * (dim_ * kLogTwoPi + u.squaredNorm());
}

double GaussianDistribution::density(const Vector& u) const {
  return std::exp(log_density(u));
}

std::vector<Vector> sample_batch(const SampleDistribution& dist, CounterRng& rng,
                                 int lambda) {
  std::vector<Vector> batch;
  batch.reserve(lambda);
  for (int i = 0; i < lambda; ++i) batch.push_back(dist.sample(rng));
  return batch;
}

}  // namespace cma
