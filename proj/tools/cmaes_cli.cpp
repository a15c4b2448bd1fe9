#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <vector>

#include "cma/config.hpp"
#include "cma/control_model.hpp"
#include "cma/diagnostics.hpp"
#include "cma/errors.hpp"
#include "cma/normalized_chain.hpp"
#include "cma/ranked_density.hpp"
#include "cma/raw_chain.hpp"

namespace {

using json = nlohmann::json;
using namespace cma;

struct CliOptions {
  std::string config_path;
  std::string out_dir;
  std::string regime;
  std::uint64_t seed = 0;
  bool seed_set = false;
  int steps = 0;
  int replicas = 0;
};

ExperimentConfig load_config(const CliOptions& opts) {
  ExperimentConfig cfg = opts.config_path.empty()
                             ? ExperimentConfig::from_string("")
                             : ExperimentConfig::from_file(opts.config_path);
  if (opts.seed_set) cfg.seed = opts.seed;
  if (!opts.out_dir.empty()) cfg.out_dir = opts.out_dir;
  if (opts.steps > 0) cfg.steps = opts.steps;
  if (opts.replicas > 0) cfg.replicas = opts.replicas;
  const Regime regime =
      opts.regime.empty() ? cfg.hp.regime() : regime_from_name(opts.regime);
  cfg.validate_regime(regime);
  return cfg;
}

std::vector<RawState> run_raw(const ExperimentConfig& cfg,
                              std::uint64_t replica) {
  const Objective f = cfg.objective();
  const GaussianDistribution dist(cfg.hp.d);
  std::vector<RawState> traj;
  traj.push_back(RawState::initial(cfg.m0, cfg.sigma0, cfg.hp.d));
  for (int t = 0; t < cfg.steps; ++t) {
    CounterRng rng(cfg.seed, replica, static_cast<std::uint64_t>(t));
    traj.push_back(step_raw(traj.back(), cfg.hp, f, rng, dist).state);
  }
  return traj;
}

std::ofstream open_out(const ExperimentConfig& cfg, const std::string& name) {
  std::filesystem::create_directories(cfg.out_dir);
  std::ofstream out(std::filesystem::path(cfg.out_dir) / name);
  if (!out) throw ConfigError("cannot open output file: " + name);
  out.precision(17);
  out << provenance_comment(cfg) << "\n";
  return out;
}

int cmd_run(const CliOptions& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const std::vector<RawState> traj = run_raw(cfg, 0);

  std::ofstream raw = open_out(cfg, "raw.csv");
  raw << "t,f_m,sigma,dist_to_opt,trace_C,lambda_min_C,lambda_max_C\n";
  const Objective f = cfg.objective();
  for (std::size_t t = 0; t < traj.size(); ++t) {
    const RawState& s = traj[t];
    raw << t << ',' << f(s.m) << ',' << s.sigma << ','
        << (s.m - cfg.xstar).norm() << ',' << s.C.trace() << ','
        << s.C.eigenvalues()(cfg.hp.d - 1) << ',' << s.C.eigenvalues()(0)
        << "\n";
  }

  std::ofstream norm = open_out(cfg, "normalized.csv");
  norm << "t,z_norm,p_norm,q_norm,r,log_det_sigma_hat,cond_sigma_hat\n";
  for (std::size_t t = 1; t < traj.size(); ++t) {
    const NormalizedState y =
        normalize(traj[t - 1], traj[t], cfg.xstar, cfg.hp.normalization);
    const SmoothState x = xi(y);
    norm << t << ',' << y.z.norm() << ',' << y.p.norm() << ',' << y.q.norm()
         << ',' << y.r << ','
         << x.Sigma_hat.dim() * std::log(x.Sigma_hat.det_root()) << ','
         << x.Sigma_hat.cond() << "\n";
  }
  return 0;
}

int cmd_rate(const CliOptions& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const ProgressDecomposition dec =
      decompose_progress(run_raw(cfg, 0), cfg.hp, cfg.xstar);
  const RateEstimate est = estimate_rate(dec.records, cfg.steps / 10);
  json out{{"rate", est.rate},
           {"stderr", est.stderr_value},
           {"count", est.count},
           {"max_identity_residual", dec.max_abs_residual},
           {"seed", cfg.seed}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_decompose(const CliOptions& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const ProgressDecomposition dec =
      decompose_progress(run_raw(cfg, 0), cfg.hp, cfg.xstar);
  std::ofstream out = open_out(cfg, "progress.jsonl");
  for (const ProgressRecord& rec : dec.records) {
    out << json{{"t", rec.t},
                {"d_log_z", rec.d_log_z},
                {"log_gamma", rec.log_gamma},
                {"half_log_r", rec.half_log_r},
                {"lhs", rec.lhs},
                {"residual", rec.residual}}
               .dump()
        << "\n";
  }
  std::cout << json{{"max_identity_residual", dec.max_abs_residual}}.dump(2)
            << "\n";
  return 0;
}

int cmd_density_check(const CliOptions& opts) {
  const ExperimentConfig cfg = load_config(opts);
  if (cfg.hp.d != 1) throw ConfigError("density-check requires dim = 1");
  const Objective f = cfg.objective();
  const GaussianDistribution dist(1);
  const Vector z = Vector::Zero(1);
  const SpdMatrix sigma = SpdMatrix::identity(1);
  // best-of-lambda selection gives a one-dimensional density to plot
  RankedDensityContext ctx(z, sigma, f, dist, cfg.hp.lambda, 1, 100000,
                           cfg.seed);

  const int n_emp = 1000000;
  const int bins = 160;
  const double lo = -4.0, hi = 4.0;
  std::vector<double> hist(bins, 0.0);
  CounterRng rng(cfg.seed, 1, 0);
  for (int n = 0; n < n_emp; ++n) {
    const std::vector<Vector> batch = sample_batch(dist, rng, cfg.hp.lambda);
    std::vector<Vector> pts(batch.size());
    for (std::size_t i = 0; i < batch.size(); ++i) {
      pts[i] = cfg.xstar + z + batch[i];
    }
    const double best = batch[rank_candidates(f, pts).order[0]](0);
    const int b = static_cast<int>((best - lo) / (hi - lo) * bins);
    if (b >= 0 && b < bins) hist[b] += 1.0;
  }

  std::ofstream out = open_out(cfg, "density.csv");
  out << "v,analytic,empirical,diff\n";
  const double bin_w = (hi - lo) / bins;
  for (int b = 0; b < bins; ++b) {
    const double v = lo + (b + 0.5) * bin_w;
    Matrix arg(1, 1);
    arg(0, 0) = v;
    const double analytic = ctx.density(arg);
    const double empirical = hist[b] / (n_emp * bin_w);
    out << v << ',' << analytic << ',' << empirical << ','
        << (empirical - analytic) << "\n";
  }
  return 0;
}

SmoothState random_smooth_state(const ExperimentConfig& cfg) {
  CounterRng rng(cfg.seed, 2, 0);
  const int d = cfg.hp.d;
  SmoothState s;
  s.z = Vector::Zero(d);
  s.p = Vector::Zero(d);
  s.q = Vector::Zero(d);
  for (int i = 0; i < d; ++i) {
    s.z(i) = rng.next_gaussian();
    s.p(i) = rng.next_gaussian();
    s.q(i) = rng.next_gaussian();
  }
  Matrix a(d, d);
  for (int i = 0; i < d; ++i) {
    for (int j = 0; j < d; ++j) a(i, j) = rng.next_gaussian();
  }
  Matrix spd = a * a.transpose() + Matrix::Identity(d, d);
  const SpdMatrix base(spd);
  s.Sigma_hat = SpdMatrix(base.mat() / rho(base));
  s.r = 0.5 + rng.next_double();
  return s;
}

int cmd_control_path(const CliOptions& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const SmoothState theta0 = random_smooth_state(cfg);
  const ControlPath path = path_to_identity(theta0, cfg.hp, 30);
  const std::vector<SmoothState> traj =
      extended_transition(theta0, cfg.hp, path);
  const SmoothState& end = traj.back();
  const Matrix dev =
      end.Sigma_hat.mat() - Matrix::Identity(cfg.hp.d, cfg.hp.d);
  json out{{"steps", path.size()},
           {"z_norm", end.z.norm()},
           {"p_norm", end.p.norm()},
           {"q_norm", end.q.norm()},
           {"sigma_dev", dev.norm()},
           {"r_dev", std::abs(end.r - (1.0 - cfg.hp.c_1 - cfg.hp.c_mu))}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_jacobian_rank(const CliOptions& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const SmoothState theta0 = random_smooth_state(cfg);
  ControlPath path = path_to_identity(theta0, cfg.hp, 10);
  CounterRng rng(cfg.seed, 3, 0);
  for (int t = 0; t < 5; ++t) {
    Matrix v(cfg.hp.d, cfg.hp.mu);
    for (int i = 0; i < v.size(); ++i) {
      *(v.data() + i) = 1e-2 * rng.next_gaussian();
    }
    path.push_back(v);
  }
  const JacobianReport report = jacobian_fd(theta0, cfg.hp, path);
  json out{{"singular_values", report.singular_values},
           {"rank", report.rank},
           {"max_rank", report.max_rank},
           {"threshold", report.threshold},
           {"fd_step", report.fd_step},
           {"regime", regime_name(cfg.hp.regime())}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

int cmd_probe(const CliOptions& opts) {
  const ExperimentConfig cfg = load_config(opts);
  const Objective f = cfg.objective();
  const GaussianDistribution dist(cfg.hp.d);

  auto run_chain = [&](double z_scale, std::uint64_t chain) {
    NormalizedState y{z_scale * Vector::Ones(cfg.hp.d), Vector::Zero(cfg.hp.d),
                      Vector::Zero(cfg.hp.d), SpdMatrix::identity(cfg.hp.d),
                      1.0};
    std::vector<NormalizedState> traj{y};
    for (int t = 0; t < cfg.steps; ++t) {
      CounterRng rng(cfg.seed, chain, static_cast<std::uint64_t>(t));
      traj.push_back(step_normalized(
          traj.back(), cfg.hp, f, sample_batch(dist, rng, cfg.hp.lambda)));
    }
    return collect_summaries(traj, cfg.hp);
  };

  const int burn_in = cfg.steps / 3;
  const StationarityReport rep =
      stationarity_probe(run_chain(1e-3, 10), run_chain(1e3, 11), burn_in,
                         cfg.steps - burn_in, 10);
  json out{{"ks_log_z", rep.ks_log_z},
           {"ks_log_gamma", rep.ks_log_gamma},
           {"ks_log_r", rep.ks_log_r},
           {"ks_log_cond", rep.ks_log_cond}};
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"CMA-ES raw, normalized and smooth chain experiment driver"};
  app.require_subcommand(1);

  CliOptions opts;
  app.add_option("--config", opts.config_path, "config file path");
  app.add_option("--out", opts.out_dir, "output directory");
  app.add_option("--regime", opts.regime, "expected regime: i, ii, iii, iv");
  app.add_option("--steps", opts.steps, "number of iterations");
  app.add_option("--replicas", opts.replicas, "number of replicas");
  auto* seed_opt = app.add_option("--seed", opts.seed, "RNG seed");

  int (*handler)(const CliOptions&) = nullptr;
  app.add_subcommand("run", "simulate and write trajectory CSVs")
      ->fallthrough()
      ->callback([&] { handler = cmd_run; });
  app.add_subcommand("rate", "estimate the linear convergence rate")
      ->fallthrough()
      ->callback([&] { handler = cmd_rate; });
  app.add_subcommand("decompose", "per-step log-progress decomposition")
      ->fallthrough()
      ->callback([&] { handler = cmd_decompose; });
  app.add_subcommand("density-check", "ranked-density vs histogram table")
      ->fallthrough()
      ->callback([&] { handler = cmd_density_check; });
  app.add_subcommand("control-path", "steer to the attractor and report errors")
      ->fallthrough()
      ->callback([&] { handler = cmd_control_path; });
  app.add_subcommand("jacobian-rank", "finite-difference controllability rank")
      ->fallthrough()
      ->callback([&] { handler = cmd_jacobian_rank; });
  app.add_subcommand("probe", "two-chain stationarity probe")
      ->fallthrough()
      ->callback([&] { handler = cmd_probe; });

  try {
    app.parse(argc, argv);
    opts.seed_set = seed_opt->count() > 0;
    return handler(opts);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numeric failure: " << e.what() << "\n";
    return 3;
  }
}
