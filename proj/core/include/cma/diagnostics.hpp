#pragma once

#include <cstdint>
#include <vector>

#include "cma/hyperparameters.hpp"
#include "cma/normalized_chain.hpp"
#include "cma/objectives.hpp"
#include "cma/raw_chain.hpp"
#include "cma/sampling.hpp"

namespace cma {

/// One step of the exact log-progress split: the change of log distance to
/// the optimum equals the change of log ||z|| plus log Gamma(p) plus half
/// the log covariance-scale change.
struct ProgressRecord {
  int t = 0;
  double d_log_z = 0.0;
  double log_gamma = 0.0;
  double half_log_r = 0.0;
  double lhs = 0.0;       // log ||m_{t+1} - x*|| - log ||m_t - x*||
  double residual = 0.0;  // lhs - (d_log_z + log_gamma + half_log_r)
};

struct ProgressDecomposition {
  std::vector<ProgressRecord> records;
  double max_abs_residual = 0.0;
};

/// Splits the per-step progress of a raw trajectory; the normalized states
/// are recomputed from consecutive raw states. Throws ZeroDistanceError if
/// some mean hits the optimum exactly.
ProgressDecomposition decompose_progress(const std::vector<RawState>& raw,
                                         const Hyperparameters& hp,
                                         const Vector& xstar);

struct RateEstimate {
  double rate = 0.0;
  double stderr_value = 0.0;
  int count = 0;
};

/// Time average of log Gamma + (1/2) log r after burn-in, with batch-means
/// standard error.
RateEstimate estimate_rate(const std::vector<ProgressRecord>& records,
                           int burn_in, int n_batches = 50);

/// Per-step summaries tracked by the stationarity probe.
struct ChainSummaries {
  std::vector<double> log_z_norm;
  std::vector<double> log_gamma;
  std::vector<double> log_r;
  std::vector<double> log_cond;
};

ChainSummaries collect_summaries(const std::vector<NormalizedState>& traj,
                                 const Hyperparameters& hp);

/// Two-sample Kolmogorov-Smirnov distance.
double ks_distance(std::vector<double> a, std::vector<double> b);

struct StationarityReport {
  double ks_log_z = 0.0;
  double ks_log_gamma = 0.0;
  double ks_log_r = 0.0;
  double ks_log_cond = 0.0;
  double max_ks() const;
};

/// KS distances between the post-burn-in windows of two chains, thinned to
/// reduce serial correlation.
StationarityReport stationarity_probe(const ChainSummaries& a,
                                      const ChainSummaries& b, int burn_in,
                                      int window, int thin);

struct HittingReport {
  std::vector<double> frequency;  // one entry per start
};

/// Fraction of stochastic replicas whose state enters the box of the given
/// side around (0, 0, 0, I_d, 1 - c_1 - c_mu) within the horizon.
HittingReport hitting_probe(const std::vector<SmoothState>& starts,
                            const Hyperparameters& hp, const Objective& f,
                            const SampleDistribution& dist, double box_side,
                            int horizon, int replicas, std::uint64_t seed);

bool in_attractor_box(const SmoothState& state, const Hyperparameters& hp,
                      double box_side);

}  // namespace cma
