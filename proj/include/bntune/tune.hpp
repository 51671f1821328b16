#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bntune/dataset.hpp"
#include "bntune/graph.hpp"
#include "bntune/learn.hpp"
#include "bntune/parallel.hpp"
#include "bntune/rng.hpp"

namespace bntune {

/// Score used on the held-out folds.
enum class TuningScore { EbicNormalised, Bdeu };

std::string_view to_string(TuningScore score);
/// Accepts "ebic" and "bdeu".
TuningScore parse_tuning_score(std::string_view name);

/// A base configuration and the hyperparameter axes to sweep. Expansion order
/// is alpha-major, then gamma or iss. An empty axis keeps the base value.
struct ConfigGrid {
  Config base;
  std::vector<double> alphas;
  std::vector<double> gammas;  // requires an EBIC base score
  std::vector<double> isses;   // requires a BDeu base score

  /// Cartesian expansion; every element is validated.
  std::vector<Config> expand() const;
  /// Largest gamma reachable by the grid (0 when it has none).
  double gamma_max() const;

  /// Default hyperparameter configuration of `algorithm`: chi-square with
  /// alpha 0.05, and EBIC gamma = 0 (family EbicNormalised) or BDeu iss = 1
  /// (family Bdeu).
  static Config default_config(Algorithm algorithm, TuningScore family);
  /// Standard sweep of `algorithm` for the given score family.
  static ConfigGrid standard(Algorithm algorithm, TuningScore family);
};

/// Per-fold outcome of one configuration.
struct FoldResult {
  bool ok = false;
  double score = 0.0;
  GraphKind kind = GraphKind::Dag;
  std::size_t arcs = 0;
  std::int64_t free_parameters = 0;
  std::string error;
  double learn_seconds = 0.0;
  double score_seconds = 0.0;
};

struct ConfigResult {
  Config config;
  bool failed = false;
  double mean_score = 0.0;  // meaningless when failed
  std::vector<FoldResult> folds;
};

struct TuningReport {
  std::vector<ConfigResult> per_config;
  std::size_t chosen_index = 0;
  Config chosen;
  TuningScore tuning_score = TuningScore::EbicNormalised;
  std::size_t folds = 0;
  Seed seed = 0;
  SplitSizes sizes;
  double gamma_max = 0.0;
  std::vector<std::string> warnings;
  double split_seconds = 0.0;
  double grid_seconds = 0.0;
  double total_seconds = 0.0;
};

/// Learner used by the tuner; replaceable for instrumentation.
using LearnFunction = std::function<LearnOutput(const CategoricalDataset&, const Config&)>;

struct TuneOptions {
  std::size_t folds = 10;
  TuningScore tuning_score = TuningScore::EbicNormalised;
  Seed seed = 0;
  std::optional<std::size_t> train_cap;
  std::optional<std::size_t> test_cap;
  /// Normalising constant for gamma; defaults to the grid's largest gamma.
  std::optional<double> gamma_max;
  Execution execution = Execution::Parallel;
  int threads = 0;
  /// Cells that have not started when this budget runs out are recorded as
  /// failed. Unset means no limit.
  std::optional<double> timeout_seconds;
  LearnFunction learner;  // defaults to bntune::learn
};

/// Tuning score of a learned DAG on test data, EBIC family: the normalised EBIC
/// with gamma' = gamma / gamma_max when the configuration carries a gamma,
/// else gamma' = 0 (BIC).
double score_for_tuning_ebic(const Dag& g, const CategoricalDataset& test, const Config& config, double gamma_max);

/// Tuning score of a learned DAG on test data, BDeu family: BDeu with the
/// configuration's iss when it carries one, else iss = 1.
double score_for_tuning_bdeu(const Dag& g, const CategoricalDataset& test, const Config& config);

/// Seed used to turn a (C)PDAG learned on fold k into a DAG.
Seed extension_seed(Seed seed, std::size_t fold);

/// Out-of-sample tuning: learns every configuration on every bootstrap
/// training fold, scores the resulting DAG on the matching out-of-bag test
/// fold, and picks the configuration with the highest mean score (earliest in
/// grid order on ties). A configuration with any failed fold is excluded with
/// a warning; throws AllConfigsFailedError when every configuration fails.
TuningReport otsl(const CategoricalDataset& data, const ConfigGrid& grid, const TuneOptions& options);

enum class SelectionCriterion { Bic, Aic };

struct SelectionResult {
  std::size_t index = 0;
  Config config;
  std::vector<double> scores;  // NaN for configurations that failed
};

/// In-sample model selection: learns every configuration on all of `data`
/// and returns the one whose DAG maximises BIC or AIC on the same data.
SelectionResult insample_select(const CategoricalDataset& data, const ConfigGrid& grid, SelectionCriterion criterion,
                                Seed seed = 0, Execution execution = Execution::Parallel, int threads = 0);

/// Uniform draw from the expanded grid.
Config random_config(const ConfigGrid& grid, Seed seed);

}  // namespace bntune
