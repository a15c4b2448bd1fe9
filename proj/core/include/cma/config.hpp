#pragma once

#include <cstdint>
#include <map>
#include <string>

#include "cma/hyperparameters.hpp"
#include "cma/objectives.hpp"
#include "cma/spd.hpp"

namespace cma {

/// Full experiment description parsed from an INI-style key-value file with
/// [objective], [algorithm] and [run] sections.
struct ExperimentConfig {
  std::string objective_name = "sphere";
  Vector xstar;
  Hyperparameters hp;
  Vector m0;
  double sigma0 = 1.0;
  std::uint64_t seed = 1;
  int steps = 1000;
  int replicas = 1;
  std::string out_dir = ".";
  std::uint64_t hash = 0;  // FNV-1a of the canonicalized source text

  static ExperimentConfig from_file(const std::string& path);
  static ExperimentConfig from_string(const std::string& text);

  Objective objective() const;

  /// Checks that the parameters actually realize the requested regime and
  /// the standing exclusions (c_mu > 0 whenever c_c < 1; in the fully
  /// cumulated regime additionally 1 - c_c != (1 - c_sigma)
  /// sqrt(1 - c_1 - c_mu)).
  void validate_regime(Regime regime) const;
};

std::uint64_t fnv1a_hash(const std::string& text);

/// "# config_hash=<hex> seed=<seed>" comment line placed atop every output.
std::string provenance_comment(const ExperimentConfig& cfg);

}  // namespace cma
