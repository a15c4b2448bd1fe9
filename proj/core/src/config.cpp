#include "cma/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "cma/errors.hpp"

namespace cma {

namespace {

std::string trim(const std::string& s) {
  const auto begin = s.find_first_not_of(" \t\r");
  if (begin == std::string::npos) return "";
  const auto end = s.find_last_not_of(" \t\r");
  return s.substr(begin, end - begin + 1);
}

struct KeyValue {
  std::string value;
  int line = 0;
  mutable bool used = false;
};

using SectionMap = std::map<std::string, std::map<std::string, KeyValue>>;

SectionMap parse_sections(const std::string& text) {
  SectionMap sections;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw ConfigError("line " + std::to_string(line_no) +
                          ": unterminated section header");
      }
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw ConfigError("line " + std::to_string(line_no) +
                        ": expected key = value");
    }
    const std::string key = trim(t.substr(0, eq));
    if (key.empty()) {
      throw ConfigError("line " + std::to_string(line_no) + ": empty key");
    }
    sections[section][key] = KeyValue{trim(t.substr(eq + 1)), line_no};
  }
  return sections;
}

class SectionReader {
 public:
  SectionReader(const SectionMap& map, std::string section)
      : map_(map), section_(std::move(section)) {}

  const KeyValue* find(const std::string& key) const {
    const auto sec = map_.find(section_);
    if (sec == map_.end()) return nullptr;
    const auto kv = sec->second.find(key);
    if (kv == sec->second.end()) return nullptr;
    kv->second.used = true;
    return &kv->second;
  }

  template <typename T>
  T number(const std::string& key, T fallback) const {
    const KeyValue* kv = find(key);
    if (!kv) return fallback;
    std::istringstream in(kv->value);
    T out;
    std::string rest;
    if (!(in >> out) || (in >> rest)) {
      throw ConfigError("line " + std::to_string(kv->line) + ": field '" +
                        section_ + "." + key + "' is not a valid number: " +
                        kv->value);
    }
    return out;
  }

  std::string text(const std::string& key, const std::string& fallback) const {
    const KeyValue* kv = find(key);
    return kv ? kv->value : fallback;
  }

  Vector vector(const std::string& key, const Vector& fallback) const {
    const KeyValue* kv = find(key);
    if (!kv) return fallback;
    std::vector<double> values;
    std::istringstream in(kv->value);
    std::string token;
    while (std::getline(in, token, ',')) {
      try {
        values.push_back(std::stod(trim(token)));
      } catch (const std::exception&) {
        throw ConfigError("line " + std::to_string(kv->line) + ": field '" +
                          section_ + "." + key + "' has a bad entry: " + token);
      }
    }
    Vector out(static_cast<int>(values.size()));
    for (std::size_t i = 0; i < values.size(); ++i) out(i) = values[i];
    return out;
  }

 private:
  const SectionMap& map_;
  std::string section_;
};

}  // namespace

std::uint64_t fnv1a_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str());
}

ExperimentConfig ExperimentConfig::from_string(const std::string& text) {
  const SectionMap sections = parse_sections(text);
  ExperimentConfig cfg;
  cfg.hash = fnv1a_hash(text);

  const SectionReader obj(sections, "objective");
  const SectionReader alg(sections, "algorithm");
  const SectionReader run(sections, "run");

  const int dim = obj.number<int>("dim", 2);
  if (dim < 1) throw ConfigError("field 'objective.dim' must be >= 1");
  cfg.objective_name = obj.text("name", "sphere");
  cfg.xstar = obj.vector("xstar", Vector::Zero(dim));
  if (static_cast<int>(cfg.xstar.size()) != dim) {
    throw ConfigError("field 'objective.xstar' must have length dim");
  }

  Hyperparameters hp = default_hyperparameters(
      dim, alg.text("gamma", "csa1") == "csa2" ? GammaVariant::CSA2
                                               : GammaVariant::CSA1);
  hp.lambda = alg.number<int>("lambda", hp.lambda);
  hp.mu = alg.number<int>("mu", hp.mu);
  hp.c_m = alg.number<double>("c_m", hp.c_m);
  hp.c_sigma = alg.number<double>("c_sigma", hp.c_sigma);
  hp.c_c = alg.number<double>("c_c", hp.c_c);
  hp.c_1 = alg.number<double>("c_1", hp.c_1);
  hp.c_mu = alg.number<double>("c_mu", hp.c_mu);
  hp.d_sigma = alg.number<double>("d_sigma", hp.d_sigma);
  if (alg.find("lambda") || alg.find("mu")) {
    hp.weights = Vector();  // re-derive from the new population sizes
    hp.cov_weights = Vector();
    hp.d_sigma = alg.find("d_sigma") ? hp.d_sigma : 0.0;
  }
  const std::string norm = alg.text("normalization", "det_root");
  if (norm == "det_root") {
    hp.normalization = NormalizationFn::det_root();
  } else if (norm.rfind("eigen:", 0) == 0) {
    hp.normalization = NormalizationFn::eigen(std::stoi(norm.substr(6)));
  } else if (norm == "min_eigen") {
    hp.normalization =
        NormalizationFn::metric_min_eigen(SpdMatrix::identity(dim));
  } else {
    throw ConfigError("field 'algorithm.normalization' unknown: " + norm);
  }
  try {
    hp.finalize();
  } catch (const ConfigError& e) {
    throw ConfigError(std::string("section [algorithm]: ") + e.what());
  }
  cfg.hp = hp;

  cfg.m0 = run.vector("m0", Vector::Ones(dim));
  if (static_cast<int>(cfg.m0.size()) != dim) {
    throw ConfigError("field 'run.m0' must have length dim");
  }
  cfg.sigma0 = run.number<double>("sigma0", 1.0);
  if (!(cfg.sigma0 > 0.0)) throw ConfigError("field 'run.sigma0' must be > 0");
  cfg.seed = run.number<std::uint64_t>("seed", 1);
  cfg.steps = run.number<int>("steps", 1000);
  cfg.replicas = run.number<int>("replicas", 1);
  if (cfg.steps < 1) throw ConfigError("field 'run.steps' must be >= 1");
  if (cfg.replicas < 1) throw ConfigError("field 'run.replicas' must be >= 1");
  cfg.out_dir = run.text("out", ".");

  (void)cfg.objective();  // validates the objective name early
  return cfg;
}

Objective ExperimentConfig::objective() const {
  return objective_by_name(objective_name, xstar);
}

void ExperimentConfig::validate_regime(Regime regime) const {
  if (hp.regime() != regime) {
    throw ConfigError("requested regime " + regime_name(regime) +
                      " but (c_sigma, c_c) give regime " +
                      regime_name(hp.regime()));
  }
  if (hp.c_c < 1.0 && hp.c_mu <= 0.0) {
    throw ConfigError("c_mu must be > 0 when c_c < 1");
  }
  if (regime == Regime::Full) {
    const double lhs = 1.0 - hp.c_c;
    const double rhs = (1.0 - hp.c_sigma) * std::sqrt(1.0 - hp.c_1 - hp.c_mu);
    if (std::abs(lhs - rhs) <= 1e-12 * (1.0 + std::abs(lhs))) {
      throw ConfigError(
          "degenerate parameters: 1 - c_c equals (1 - c_sigma) "
          "sqrt(1 - c_1 - c_mu)");
    }
  }
}

std::string provenance_comment(const ExperimentConfig& cfg) {
  std::ostringstream out;
  out << "# config_hash=" << std::hex << cfg.hash << std::dec
      << " seed=" << cfg.seed;
  return out.str();
}

}  // namespace cma
