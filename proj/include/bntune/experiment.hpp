#pragma once

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "bntune/json_io.hpp"
#include "bntune/learn.hpp"
#include "bntune/tune.hpp"

namespace bntune {

/// Either a ground-truth network sampled at each size, or a fixed CSV with a
/// truth graph (network JSON or Graph JSON).
struct DatasetSpec {
  std::string name;
  std::optional<std::filesystem::path> network;
  std::optional<std::filesystem::path> csv;
  std::optional<std::filesystem::path> truth;
  std::vector<std::size_t> sizes;
  std::vector<Seed> seeds;
};

/// One algorithm and its sweep. Unset axes fall back to the standard grids.
struct AlgorithmSpec {
  Algorithm algorithm = Algorithm::HillClimbing;
  CiTestKind ci_test = CiTestKind::ChiSquare;
  std::optional<std::vector<double>> alphas;
  std::optional<std::vector<double>> gammas;
  std::optional<std::vector<double>> isses;
  double default_alpha = 0.05;
  int max_sepset = -1;

  ConfigGrid grid(TuningScore family) const;
  Config default_config(TuningScore family) const;
};

enum class TuningMethod { None, OtslEbic, OtslBdeu, InsampleBic, InsampleAic, Random };

std::string_view to_string(TuningMethod method);
/// Accepts NONE, OTSL-EBIC, OTSL-BDEU, INSAMPLE-BIC, INSAMPLE-AIC, RANDOM.
TuningMethod parse_tuning_method(std::string_view name);

struct ExperimentPlan {
  std::vector<DatasetSpec> datasets;
  std::vector<AlgorithmSpec> algorithms;
  std::vector<TuningMethod> methods;
  std::size_t folds = 10;
  std::optional<std::size_t> train_cap;
  std::optional<std::size_t> test_cap;
  std::optional<double> timeout_seconds;
  std::filesystem::path output;

  /// Score families in play: EBIC when OTSL-EBIC is requested, BDeu when
  /// OTSL-BDEU is, EBIC alone when neither is.
  std::vector<TuningScore> families() const;

  /// Relative paths resolve against `base_dir`. Throws ValidationError for a
  /// malformed plan, a missing file, or an invalid grid.
  static ExperimentPlan from_json(const Json& j, const std::filesystem::path& base_dir);
};

ExperimentPlan load_plan(const std::filesystem::path& path);

/// One cell of the experiment matrix.
struct RunKey {
  std::string dataset;
  std::size_t size = 0;  // 0 for CSV datasets
  Seed seed = 0;
  Algorithm algorithm = Algorithm::HillClimbing;
  TuningMethod method = TuningMethod::None;
  TuningScore family = TuningScore::EbicNormalised;

  std::string id() const;
};

std::vector<RunKey> enumerate_runs(const ExperimentPlan& plan);

struct ExperimentOptions {
  Execution execution = Execution::Parallel;
  int threads = 0;
  std::ostream* log = nullptr;
};

struct ExperimentSummary {
  std::size_t runs = 0;
  std::size_t executed = 0;
  std::size_t skipped = 0;
  std::size_t failed = 0;
};

/// Executes every run whose result file is missing, then rebuilds the tables
/// from the result files on disk. Per-run failures are recorded and the
/// remaining runs continue.
ExperimentSummary run_experiment(const ExperimentPlan& plan, const ExperimentOptions& options = {});

/// Aggregates the per-run JSON files into CSV tables and summary.json.
Json aggregate_results(const ExperimentPlan& plan);

}  // namespace bntune
