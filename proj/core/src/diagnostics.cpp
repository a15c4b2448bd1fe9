#include "cma/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "cma/errors.hpp"

namespace cma {

ProgressDecomposition decompose_progress(const std::vector<RawState>& raw,
                                         const Hyperparameters& hp,
                                         const Vector& xstar) {
  ProgressDecomposition out;
  if (raw.size() < 3) return out;
  for (const RawState& s : raw) {
    if ((s.m - xstar).norm() == 0.0) {
      throw ZeroDistanceError("mean equals the optimum; log distance undefined");
    }
  }
  // normalized states exist from t = 1 on
  NormalizedState cur = normalize(raw[0], raw[1], xstar, hp.normalization);
  for (std::size_t t = 1; t + 1 < raw.size(); ++t) {
    const NormalizedState next =
        normalize(raw[t], raw[t + 1], xstar, hp.normalization);
    ProgressRecord rec;
    rec.t = static_cast<int>(t);
    rec.d_log_z = std::log(next.z.norm()) - std::log(cur.z.norm());
    rec.log_gamma = std::log(hp.gamma(next.p));
    rec.half_log_r = 0.5 * std::log(next.r);
    rec.lhs = std::log((raw[t + 1].m - xstar).norm()) -
              std::log((raw[t].m - xstar).norm());
    rec.residual = rec.lhs - (rec.d_log_z + rec.log_gamma + rec.half_log_r);
    out.max_abs_residual = std::max(out.max_abs_residual, std::abs(rec.residual));
    out.records.push_back(rec);
    cur = next;
  }
  return out;
}

RateEstimate estimate_rate(const std::vector<ProgressRecord>& records,
                           int burn_in, int n_batches) {
  RateEstimate est;
  std::vector<double> terms;
  for (const ProgressRecord& rec : records) {
    if (rec.t >= burn_in) terms.push_back(rec.log_gamma + rec.half_log_r);
  }
  est.count = static_cast<int>(terms.size());
  if (terms.empty()) return est;
  double mean = 0.0;
  for (double x : terms) mean += x;
  mean /= terms.size();
  est.rate = mean;

  n_batches = std::min<int>(n_batches, static_cast<int>(terms.size()));
  if (n_batches < 2) return est;
  const int batch_len = static_cast<int>(terms.size()) / n_batches;
  std::vector<double> batch_means;
  for (int b = 0; b < n_batches; ++b) {
    double m = 0.0;
    for (int i = 0; i < batch_len; ++i) m += terms[b * batch_len + i];
    batch_means.push_back(m / batch_len);
  }
  double var = 0.0;
  for (double m : batch_means) var += (m - mean) * (m - mean);
  var /= (n_batches - 1);
  est.stderr_value = std::sqrt(var / n_batches);
  return est;
}

ChainSummaries collect_summaries(const std::vector<NormalizedState>& traj,
                                 const Hyperparameters& hp) {
  ChainSummaries s;
  for (const NormalizedState& y : traj) {
    s.log_z_norm.push_back(std::log(y.z.norm()));
    s.log_gamma.push_back(std::log(hp.gamma(y.p)));
    s.log_r.push_back(std::log(y.r));
    s.log_cond.push_back(std::log(y.Sigma.cond()));
  }
  return s;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) return 1.0;
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    // step past every copy of the next value in both samples, so the CDFs
    // are only compared between distinct values
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / a.size() -
                             static_cast<double>(j) / b.size()));
  }
  return d;
}

double StationarityReport::max_ks() const {
  return std::max(std::max(ks_log_z, ks_log_gamma), std::max(ks_log_r, ks_log_cond));
}

namespace {

std::vector<double> window_thin(const std::vector<double>& x, int burn_in,
                                int window, int thin) {
  std::vector<double> out;
  const int end = std::min<int>(static_cast<int>(x.size()), burn_in + window);
  for (int i = burn_in; i < end; i += std::max(thin, 1)) out.push_back(x[i]);
  return out;
}

}  // namespace

StationarityReport stationarity_probe(const ChainSummaries& a,
                                      const ChainSummaries& b, int burn_in,
                                      int window, int thin) {
  StationarityReport rep;
  rep.ks_log_z = ks_distance(window_thin(a.log_z_norm, burn_in, window, thin),
                             window_thin(b.log_z_norm, burn_in, window, thin));
  rep.ks_log_gamma = ks_distance(window_thin(a.log_gamma, burn_in, window, thin),
                                 window_thin(b.log_gamma, burn_in, window, thin));
  rep.ks_log_r = ks_distance(window_thin(a.log_r, burn_in, window, thin),
                             window_thin(b.log_r, burn_in, window, thin));
  rep.ks_log_cond = ks_distance(window_thin(a.log_cond, burn_in, window, thin),
                                window_thin(b.log_cond, burn_in, window, thin));
  return rep;
}

bool in_attractor_box(const SmoothState& state, const Hyperparameters& hp,
                      double box_side) {
  const double half = 0.5 * box_side;
  const double r_target = 1.0 - hp.c_1 - hp.c_mu;
  const Matrix dev =
      state.Sigma_hat.mat() - Matrix::Identity(hp.d, hp.d);
  return state.z.lpNorm<Eigen::Infinity>() <= half &&
         state.p.lpNorm<Eigen::Infinity>() <= half &&
         state.q.lpNorm<Eigen::Infinity>() <= half &&
         dev.cwiseAbs().maxCoeff() <= half && std::abs(state.r - r_target) <= half;
}

HittingReport hitting_probe(const std::vector<SmoothState>& starts,
                            const Hyperparameters& hp, const Objective& f,
                            const SampleDistribution& dist, double box_side,
                            int horizon, int replicas, std::uint64_t seed) {
  HittingReport rep;
  for (std::size_t s = 0; s < starts.size(); ++s) {
    int hits = 0;
    for (int rep_i = 0; rep_i < replicas; ++rep_i) {
      CounterRng rng(seed, (s << 20) + rep_i, 0);
      SmoothState state = starts[s];
      bool hit = in_attractor_box(state, hp, box_side);
      for (int t = 0; t < horizon && !hit; ++t) {
        state = step_smooth(state, hp, f, sample_batch(dist, rng, hp.lambda));
        hit = in_attractor_box(state, hp, box_side);
      }
      if (hit) ++hits;
    }
    rep.frequency.push_back(static_cast<double>(hits) / replicas);
  }
  return rep;
}

}  // namespace cma
