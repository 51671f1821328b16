#include "bntune/learn.hpp"

#include <sstream>

#include "bntune/error.hpp"

namespace bntune {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::HillClimbing: return "hc";
    case Algorithm::PcStable: return "pc-stable";
    case Algorithm::Mmhc: return "mmhc";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view name) {
  if (name == "hc") return Algorithm::HillClimbing;
  if (name == "pc-stable") return Algorithm::PcStable;
  if (name == "mmhc") return Algorithm::Mmhc;
  throw ArgumentError("unknown algorithm '" + std::string(name) + "' (expected hc, pc-stable or mmhc)");
}

std::string_view to_string(GraphKind kind) {
  switch (kind) {
    case GraphKind::Dag: return "DAG";
    case GraphKind::Cpdag: return "CPDAG";
    case GraphKind::Pdag: return "PDAG";
  }
  return "?";
}

void Config::validate() const {
  const bool needs_ci = algorithm != Algorithm::HillClimbing;
  const bool needs_score = algorithm != Algorithm::PcStable;
  const std::string name(to_string(algorithm));
  if (needs_ci && (!ci_test || !alpha)) throw ArgumentError(name + " requires a CI test and a significance level");
  if (!needs_ci && (ci_test || alpha)) throw ArgumentError(name + " takes no CI test or significance level");
  if (needs_score && !score) throw ArgumentError(name + " requires a score");
  if (!needs_score && score) throw ArgumentError(name + " takes no score");
  if (alpha && !(*alpha > 0.0 && *alpha < 1.0)) throw ArgumentError("significance level must lie in (0, 1)");
  if (max_sepset < -1) throw ArgumentError("max_sepset must be -1 (unlimited) or >= 0");
}

std::string Config::label() const {
  std::ostringstream os;
  os << to_string(algorithm);
  if (ci_test) os << " " << to_string(*ci_test);
  if (alpha) os << " alpha=" << *alpha;
  if (score) os << " " << score->label();
  if (max_sepset >= 0) os << " max_sepset=" << max_sepset;
  return os.str();
}

Dag LearnOutput::to_dag(Seed seed, ExtensionPolicy policy) const {
  if (kind == GraphKind::Dag) return dag();
  if (kind == GraphKind::Cpdag) return cpdag_to_dag(pdag(), seed, policy);
  return pdag_to_dag(pdag(), seed, policy);
}

LearnOutput learn(const CategoricalDataset& data, const Config& config, const HillClimbOptions& options) {
  config.validate();
  switch (config.algorithm) {
    case Algorithm::HillClimbing: return hill_climb(data, *config.score, std::nullopt, config.seed, options);
    case Algorithm::PcStable: return pc_stable(data, *config.ci_test, *config.alpha, config.max_sepset);
    case Algorithm::Mmhc:
      return mmhc(data, *config.ci_test, *config.alpha, *config.score, config.seed, config.max_sepset, options);
  }
  throw ArgumentError("unknown algorithm");
}

}  // namespace bntune
