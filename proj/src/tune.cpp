#include "bntune/tune.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

#include "bntune/error.hpp"
#include "bntune/score.hpp"

namespace bntune {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<double> range(double first, double last) {
  std::vector<double> out;
  for (double v = first; v <= last; v += 1.0) out.push_back(v);
  return out;
}

// MMHC configs that differ only in the score share their MMPC restriction, so
// it is computed once per (data slot, test, alpha, max_sepset).
class RestrictionCache {
 public:
  LearnOutput learn(const CategoricalDataset& data, std::size_t slot, const Config& config) {
    if (config.algorithm != Algorithm::Mmhc) return bntune::learn(data, config);
    config.validate();
    const Key key{slot, static_cast<int>(*config.ci_test), *config.alpha, config.max_sepset};
    std::shared_ptr<const ParentRestriction> restriction;
    {
      std::lock_guard lock(mutex_);
      if (auto it = entries_.find(key); it != entries_.end()) restriction = it->second;
    }
    if (!restriction) {
      auto computed = std::make_shared<const ParentRestriction>(
          mmpc(data, *config.ci_test, *config.alpha, config.max_sepset));
      std::lock_guard lock(mutex_);
      restriction = entries_.emplace(key, std::move(computed)).first->second;
    }
    return hill_climb(data, *config.score, *restriction, config.seed);
  }

 private:
  using Key = std::tuple<std::size_t, int, double, int>;
  std::mutex mutex_;
  std::map<Key, std::shared_ptr<const ParentRestriction>> entries_;
};

}  // namespace

std::string_view to_string(TuningScore score) {
  return score == TuningScore::EbicNormalised ? "ebic" : "bdeu";
}

TuningScore parse_tuning_score(std::string_view name) {
  if (name == "ebic") return TuningScore::EbicNormalised;
  if (name == "bdeu") return TuningScore::Bdeu;
  throw ArgumentError("unknown tuning score '" + std::string(name) + "' (expected ebic or bdeu)");
}

std::vector<Config> ConfigGrid::expand() const {
  if (!gammas.empty() && !(base.score && base.score->kind == ScoreKind::Ebic))
    throw ArgumentError("a gamma axis needs an EBIC base score");
  if (!isses.empty() && !(base.score && base.score->kind == ScoreKind::Bdeu))
    throw ArgumentError("an iss axis needs a BDeu base score");
  if (!alphas.empty() && !base.alpha) throw ArgumentError("an alpha axis needs a constraint-based algorithm");

  std::vector<std::optional<double>> alpha_axis;
  if (alphas.empty())
    alpha_axis.push_back(base.alpha);
  else
    alpha_axis.assign(alphas.begin(), alphas.end());

  std::vector<std::optional<ScoreSpec>> score_axis;
  if (!gammas.empty())
    for (double g : gammas) score_axis.push_back(ScoreSpec::ebic(g));
  else if (!isses.empty())
    for (double i : isses) score_axis.push_back(ScoreSpec::bdeu(i));
  else
    score_axis.push_back(base.score);

  std::vector<Config> out;
  out.reserve(alpha_axis.size() * score_axis.size());
  for (const auto& a : alpha_axis) {
    for (const auto& s : score_axis) {
      Config c = base;
      c.alpha = a;
      c.score = s;
      c.validate();
      out.push_back(c);
    }
  }
  return out;
}

double ConfigGrid::gamma_max() const {
  double m = 0.0;
  for (double g : gammas) m = std::max(m, g);
  if (gammas.empty() && base.score && base.score->has_gamma()) m = base.score->gamma;
  return m;
}

Config ConfigGrid::default_config(Algorithm algorithm, TuningScore family) {
  Config c;
  c.algorithm = algorithm;
  if (algorithm != Algorithm::HillClimbing) {
    c.ci_test = CiTestKind::ChiSquare;
    c.alpha = 0.05;
  }
  if (algorithm != Algorithm::PcStable)
    c.score = family == TuningScore::EbicNormalised ? ScoreSpec::ebic(0.0) : ScoreSpec::bdeu(1.0);
  return c;
}

ConfigGrid ConfigGrid::standard(Algorithm algorithm, TuningScore family) {
  ConfigGrid grid;
  grid.base = default_config(algorithm, family);
  const bool ebic = family == TuningScore::EbicNormalised;
  switch (algorithm) {
    case Algorithm::PcStable:
      grid.alphas = {0.01, 0.05, 0.1};
      break;
    case Algorithm::HillClimbing:
      if (ebic)
        grid.gammas = range(0, 19);
      else
        grid.isses = range(1, 20);
      break;
    case Algorithm::Mmhc:
      grid.alphas = {0.01, 0.05};
      if (ebic)
        grid.gammas = range(0, 9);
      else
        grid.isses = range(1, 10);
      break;
  }
  return grid;
}

double score_for_tuning_ebic(const Dag& g, const CategoricalDataset& test, const Config& config, double gamma_max) {
  const double gamma_prime =
      config.score && config.score->has_gamma() ? map_gamma_to_prime(config.score->gamma, gamma_max) : 0.0;
  return ebic_normalised(g, test, gamma_prime);
}

double score_for_tuning_bdeu(const Dag& g, const CategoricalDataset& test, const Config& config) {
  const double iss = config.score && config.score->has_iss() ? config.score->iss : 1.0;
  return bdeu(g, test, iss);
}

Seed extension_seed(Seed seed, std::size_t fold) { return derive_seed(seed, {0x6578u, fold}); }

TuningReport otsl(const CategoricalDataset& data, const ConfigGrid& grid, const TuneOptions& options) {
  const auto start = Clock::now();
  if (options.folds < 2) throw ArgumentError("OTSL needs at least 2 folds");
  const std::vector<Config> configs = grid.expand();
  if (configs.empty()) throw ArgumentError("configuration grid is empty");

  TuningReport report;
  report.tuning_score = options.tuning_score;
  report.folds = options.folds;
  report.seed = options.seed;
  report.gamma_max = options.gamma_max.value_or(grid.gamma_max());

  SplitOptions split;
  split.folds = options.folds;
  split.seed = options.seed;
  split.train_cap = options.train_cap;
  split.test_cap = options.test_cap;
  report.sizes = split_sizes(data.rows(), split);
  const std::vector<ResampledSplit> splits = resample_split(data, split);
  report.split_seconds = seconds_since(start);

  RestrictionCache cache;

  const std::size_t C = configs.size();
  const std::size_t K = options.folds;
  std::vector<FoldResult> cells(C * K);
  const auto grid_start = Clock::now();

  auto run_cell = [&](std::size_t cell) {
    const std::size_t c = cell / K;
    const std::size_t k = cell % K;
    FoldResult& out = cells[cell];
    if (options.timeout_seconds && seconds_since(start) > *options.timeout_seconds) {
      out.error = "timeout before start";
      return;
    }
    try {
      Config config = configs[c];
      config.seed = derive_seed(options.seed, {c, k});
      auto t0 = Clock::now();
      const LearnOutput learned =
          options.learner ? options.learner(splits[k].train, config) : cache.learn(splits[k].train, k, config);
      const Dag g = learned.to_dag(extension_seed(options.seed, k), ExtensionPolicy::Strict);
      out.learn_seconds = seconds_since(t0);
      out.kind = learned.kind;
      out.arcs = g.arc_count();

      t0 = Clock::now();
      const CategoricalDataset& test = splits[k].test;
      out.score = options.tuning_score == TuningScore::EbicNormalised
                      ? score_for_tuning_ebic(g, test, configs[c], report.gamma_max)
                      : score_for_tuning_bdeu(g, test, configs[c]);
      out.free_parameters = free_parameters(g, test.schema());
      out.score_seconds = seconds_since(t0);
      out.ok = true;
    } catch (const std::exception& e) {
      out.ok = false;
      out.error = e.what();
    }
  };

  const bool parallel = options.execution == Execution::Parallel && !in_parallel_region();
  if (parallel) {
    const int threads = resolve_threads(options.threads);
    const auto total = static_cast<std::int64_t>(C * K);
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
    for (std::int64_t cell = 0; cell < total; ++cell) run_cell(static_cast<std::size_t>(cell));
  } else {
    for (std::size_t cell = 0; cell < C * K; ++cell) run_cell(cell);
  }
  report.grid_seconds = seconds_since(grid_start);

  // Aggregation runs in grid order so the result is schedule independent.
  std::optional<std::size_t> best;
  report.per_config.resize(C);
  for (std::size_t c = 0; c < C; ++c) {
    ConfigResult& r = report.per_config[c];
    r.config = configs[c];
    r.folds.assign(cells.begin() + static_cast<std::ptrdiff_t>(c * K),
                   cells.begin() + static_cast<std::ptrdiff_t>((c + 1) * K));
    double sum = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      const FoldResult& f = r.folds[k];
      if (!f.ok) {
        r.failed = true;
        report.warnings.push_back("config " + std::to_string(c) + " (" + configs[c].label() + ") failed on fold " +
                                  std::to_string(k + 1) + ": " + f.error);
        continue;
      }
      sum += f.score;
    }
    r.mean_score = r.failed ? std::numeric_limits<double>::quiet_NaN() : sum / static_cast<double>(K);
    if (!r.failed && (!best || r.mean_score > report.per_config[*best].mean_score)) best = c;
  }
  if (!best) throw AllConfigsFailedError("every configuration failed on at least one fold");
  report.chosen_index = *best;
  report.chosen = configs[*best];
  report.total_seconds = seconds_since(start);
  return report;
}

SelectionResult insample_select(const CategoricalDataset& data, const ConfigGrid& grid, SelectionCriterion criterion,
                                Seed seed, Execution execution, int threads) {
  const std::vector<Config> configs = grid.expand();
  if (configs.empty()) throw ArgumentError("configuration grid is empty");
  const std::size_t C = configs.size();
  SelectionResult result;
  result.scores.assign(C, std::numeric_limits<double>::quiet_NaN());
  std::vector<std::string> errors(C);
  RestrictionCache cache;

  auto run = [&](std::size_t c) {
    try {
      Config config = configs[c];
      config.seed = derive_seed(seed, {c});
      const Dag g = cache.learn(data, 0, config).to_dag(extension_seed(seed, 0), ExtensionPolicy::Strict);
      result.scores[c] = criterion == SelectionCriterion::Bic ? bic(g, data) : aic(g, data);
    } catch (const std::exception& e) {
      errors[c] = e.what();
    }
  };

  if (execution == Execution::Parallel && !in_parallel_region()) {
    const int n_threads = resolve_threads(threads);
#pragma omp parallel for schedule(dynamic, 1) num_threads(n_threads)
    for (std::int64_t c = 0; c < static_cast<std::int64_t>(C); ++c) run(static_cast<std::size_t>(c));
  } else {
    for (std::size_t c = 0; c < C; ++c) run(c);
  }

  std::optional<std::size_t> best;
  for (std::size_t c = 0; c < C; ++c) {
    if (std::isnan(result.scores[c])) continue;
    if (!best || result.scores[c] > result.scores[*best]) best = c;
  }
  if (!best) throw AllConfigsFailedError("every configuration failed: " + errors.front());
  result.index = *best;
  result.config = configs[*best];
  return result;
}

Config random_config(const ConfigGrid& grid, Seed seed) {
  const std::vector<Config> configs = grid.expand();
  if (configs.empty()) throw ArgumentError("configuration grid is empty");
  Rng rng(seed);
  return configs[rng.uniform_index(configs.size())];
}

}  // namespace bntune
