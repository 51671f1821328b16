#include "bntune/experiment.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <tuple>

#include "bntune/bayes_net.hpp"
#include "bntune/error.hpp"
#include "bntune/eval.hpp"

namespace bntune {

namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

constexpr TuningMethod kAllMethods[] = {TuningMethod::None,        TuningMethod::OtslEbic,    TuningMethod::OtslBdeu,
                                        TuningMethod::InsampleBic, TuningMethod::InsampleAic, TuningMethod::Random};

std::string fmt(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string family_tag(TuningScore family) { return family == TuningScore::EbicNormalised ? "A" : "B"; }

std::vector<double> number_list(const Json& j, const char* key) {
  std::vector<double> out;
  for (const auto& v : j.at(key)) out.push_back(v.get<double>());
  if (out.empty()) throw ValidationError(std::string("'") + key + "' must not be empty");
  return out;
}

bool safe_name(const std::string& s) {
  if (s.empty()) return false;
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '-' || c == '_' || c == '.')) return false;
  return true;
}

fs::path runs_dir(const ExperimentPlan& plan) { return plan.output / "runs"; }
fs::path result_path(const ExperimentPlan& plan, const RunKey& key) { return runs_dir(plan) / (key.id() + ".json"); }
fs::path timing_path(const ExperimentPlan& plan, const RunKey& key) {
  return runs_dir(plan) / (key.id() + ".timing.json");
}

Json key_to_json(const RunKey& key) {
  return {{"dataset", key.dataset},
          {"size", key.size},
          {"seed", key.seed},
          {"algorithm", std::string(to_string(key.algorithm))},
          {"method", std::string(to_string(key.method))},
          {"family", family_tag(key.family)}};
}

// Truth DAG with nodes ordered like the data columns.
Dag align_truth(const std::vector<std::string>& truth_nodes, const Dag& truth, const Schema& schema) {
  if (truth_nodes.size() != schema.size()) throw ValidationError("truth graph and data have different variables");
  std::vector<std::size_t> to_data(truth_nodes.size());
  for (std::size_t i = 0; i < truth_nodes.size(); ++i) {
    auto idx = schema.index_of(truth_nodes[i]);
    if (!idx) throw ValidationError("truth node '" + truth_nodes[i] + "' is not a data column");
    to_data[i] = *idx;
  }
  std::vector<Arc> arcs;
  for (auto [u, v] : truth.arcs()) arcs.emplace_back(to_data[u], to_data[v]);
  return Dag::from_arcs(schema.size(), arcs);
}

struct LoadedDataset {
  std::optional<BayesNet> network;
  std::optional<CategoricalDataset> data;  // CSV datasets only
  Dag truth;
};

LoadedDataset load_dataset(const DatasetSpec& spec) {
  LoadedDataset out;
  if (spec.network) {
    out.network = load_bayes_net(*spec.network);
    out.truth = out.network->dag();
    return out;
  }
  out.data = load_csv(*spec.csv);
  const Json tj = read_json_file(*spec.truth);
  if (tj.contains("variables")) {
    const BayesNet bn = bayes_net_from_json(tj);
    out.truth = align_truth(bn.schema().names(), bn.dag(), out.data->schema());
  } else {
    const GraphDocument doc = graph_from_json(tj);
    if (doc.kind != GraphKind::Dag) throw ValidationError("truth graph must be a DAG");
    out.truth = align_truth(doc.nodes, doc.to_dag(0), out.data->schema());
  }
  return out;
}

Json execute_run(const ExperimentPlan& plan, const AlgorithmSpec& algo, const RunKey& key, const LoadedDataset& ds,
                 const ExperimentOptions& options, Json& timing) {
  Json result;
  result["key"] = key_to_json(key);
  const auto start = Clock::now();
  const CategoricalDataset data =
      ds.network ? forward_sample(*ds.network, key.size, derive_seed(key.seed, {key.size})) : *ds.data;

  const ConfigGrid grid = algo.grid(key.family);
  Config chosen;
  Json tuning = Json::object();
  switch (key.method) {
    case TuningMethod::None: chosen = algo.default_config(key.family); break;
    case TuningMethod::OtslEbic:
    case TuningMethod::OtslBdeu: {
      TuneOptions t;
      t.folds = plan.folds;
      t.tuning_score = key.family;
      t.seed = derive_seed(key.seed, {1});
      t.train_cap = plan.train_cap;
      t.test_cap = plan.test_cap;
      t.timeout_seconds = plan.timeout_seconds;
      t.execution = options.execution;
      t.threads = options.threads;
      try {
        const TuningReport report = otsl(data, grid, t);
        chosen = report.chosen;
        tuning["chosen_index"] = report.chosen_index;
        tuning["grid_size"] = report.per_config.size();
        tuning["chosen_mean_score"] = report.per_config[report.chosen_index].mean_score;
        tuning["warnings"] = report.warnings;
      } catch (const AllConfigsFailedError& e) {
        chosen = algo.default_config(key.family);
        tuning["fallback"] = "default";
        tuning["fallback_reason"] = e.what();
      }
      break;
    }
    case TuningMethod::InsampleBic:
    case TuningMethod::InsampleAic: {
      const auto criterion = key.method == TuningMethod::InsampleBic ? SelectionCriterion::Bic : SelectionCriterion::Aic;
      try {
        const SelectionResult sel =
            insample_select(data, grid, criterion, derive_seed(key.seed, {1}), options.execution, options.threads);
        chosen = sel.config;
        tuning["chosen_index"] = sel.index;
        tuning["grid_size"] = sel.scores.size();
      } catch (const AllConfigsFailedError& e) {
        chosen = algo.default_config(key.family);
        tuning["fallback"] = "default";
        tuning["fallback_reason"] = e.what();
      }
      break;
    }
    case TuningMethod::Random:
      chosen = random_config(grid, derive_seed(key.seed, {2, static_cast<std::uint64_t>(key.algorithm)}));
      break;
  }
  const double tune_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  const auto learn_start = Clock::now();
  Config final_config = chosen;
  final_config.seed = derive_seed(key.seed, {3});
  HillClimbOptions hc;
  hc.execution = options.execution;
  hc.threads = options.threads;
  const LearnOutput learned = learn(data, final_config, hc);
  // Evaluation must score every run, so an inextensible PDAG is completed
  // best-effort here instead of failing the run.
  const Dag dag = learned.to_dag(derive_seed(key.seed, {4}), ExtensionPolicy::BestEffort);
  const double learn_seconds = std::chrono::duration<double>(Clock::now() - learn_start).count();

  result["status"] = "ok";
  result["config"] = config_to_json(chosen);
  result["config_label"] = chosen.label();
  result["tuning"] = tuning;
  result["output_kind"] = std::string(to_string(learned.kind));
  result["graph"] = graph_to_json(data.schema().names(), dag);
  result["rows"] = data.rows();
  result["metrics"] = metrics_to_json(f1_score(dag, ds.truth));
  timing = {{"tune_seconds", tune_seconds}, {"learn_seconds", learn_seconds}};
  return result;
}

struct Accumulator {
  std::size_t runs = 0;
  std::size_t failed = 0;
  std::size_t fallbacks = 0;
  double f1 = 0.0;
  double shd = 0.0;
  void add(const Json& r) {
    if (r.at("status") != "ok") {
      ++failed;
      return;
    }
    ++runs;
    if (r.at("tuning").contains("fallback")) ++fallbacks;
    f1 += r.at("metrics").at("f1").get<double>();
    shd += r.at("metrics").at("shd").get<double>();
  }
  double mean_f1() const { return runs ? f1 / static_cast<double>(runs) : std::nan(""); }
  double mean_shd() const { return runs ? shd / static_cast<double>(runs) : std::nan(""); }
};

Json number_or_null(double v) { return std::isnan(v) ? Json(nullptr) : Json(v); }

std::string change_cell(double tuned, double base, MetricSense sense) {
  if (std::isnan(tuned) || std::isnan(base)) return "NA";
  const RelativeChange rc = relative_change(tuned, base, sense);
  return rc.absolute ? "abs:" + fmt(rc.value, 4) : fmt(rc.value, 2);
}

}  // namespace

ConfigGrid AlgorithmSpec::grid(TuningScore family) const {
  ConfigGrid g = ConfigGrid::standard(algorithm, family);
  g.base = default_config(family);
  if (alphas) {
    if (algorithm == Algorithm::HillClimbing) throw ValidationError("hc takes no alpha axis");
    g.alphas = *alphas;
  }
  const bool scored = algorithm != Algorithm::PcStable;
  if (gammas && family == TuningScore::EbicNormalised) {
    if (!scored) throw ValidationError("pc-stable takes no gamma axis");
    g.gammas = *gammas;
  }
  if (isses && family == TuningScore::Bdeu) {
    if (!scored) throw ValidationError("pc-stable takes no iss axis");
    g.isses = *isses;
  }
  return g;
}

Config AlgorithmSpec::default_config(TuningScore family) const {
  Config c = ConfigGrid::default_config(algorithm, family);
  if (algorithm != Algorithm::HillClimbing) {
    c.ci_test = ci_test;
    c.alpha = default_alpha;
  }
  c.max_sepset = max_sepset;
  return c;
}

std::string_view to_string(TuningMethod method) {
  switch (method) {
    case TuningMethod::None: return "NONE";
    case TuningMethod::OtslEbic: return "OTSL-EBIC";
    case TuningMethod::OtslBdeu: return "OTSL-BDEU";
    case TuningMethod::InsampleBic: return "INSAMPLE-BIC";
    case TuningMethod::InsampleAic: return "INSAMPLE-AIC";
    case TuningMethod::Random: return "RANDOM";
  }
  return "?";
}

TuningMethod parse_tuning_method(std::string_view name) {
  for (auto m : kAllMethods)
    if (to_string(m) == name) return m;
  throw ArgumentError("unknown tuning method '" + std::string(name) + "'");
}

std::vector<TuningScore> ExperimentPlan::families() const {
  std::vector<TuningScore> out;
  auto has = [&](TuningMethod m) { return std::find(methods.begin(), methods.end(), m) != methods.end(); };
  if (has(TuningMethod::OtslEbic) || !has(TuningMethod::OtslBdeu)) out.push_back(TuningScore::EbicNormalised);
  if (has(TuningMethod::OtslBdeu)) out.push_back(TuningScore::Bdeu);
  return out;
}

ExperimentPlan ExperimentPlan::from_json(const Json& j, const fs::path& base_dir) {
  ExperimentPlan plan;
  auto resolve = [&](const std::string& p) {
    fs::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  auto require_file = [](const fs::path& p) {
    if (!fs::is_regular_file(p)) throw ValidationError("file not found: '" + p.string() + "'");
  };
  try {
    if (!j.is_object()) throw ValidationError("plan must be a JSON object");
    plan.output = resolve(j.at("output").get<std::string>());
    if (j.contains("folds")) plan.folds = j.at("folds").get<std::size_t>();
    if (plan.folds < 2) throw ValidationError("folds must be at least 2");
    if (j.contains("train_cap") && !j.at("train_cap").is_null()) plan.train_cap = j.at("train_cap").get<std::size_t>();
    if (j.contains("test_cap") && !j.at("test_cap").is_null()) plan.test_cap = j.at("test_cap").get<std::size_t>();
    if (j.contains("timeout") && !j.at("timeout").is_null()) plan.timeout_seconds = j.at("timeout").get<double>();

    std::set<std::string> names;
    for (const auto& d : j.at("datasets")) {
      DatasetSpec ds;
      ds.name = d.at("name").get<std::string>();
      if (!safe_name(ds.name)) throw ValidationError("dataset name '" + ds.name + "' must be [A-Za-z0-9._-]+");
      if (!names.insert(ds.name).second) throw ValidationError("duplicate dataset '" + ds.name + "'");
      if (d.contains("network") == d.contains("csv"))
        throw ValidationError("dataset '" + ds.name + "' needs exactly one of 'network' or 'csv'");
      if (d.contains("network")) {
        ds.network = resolve(d.at("network").get<std::string>());
        require_file(*ds.network);
        for (const auto& n : d.at("sizes")) ds.sizes.push_back(n.get<std::size_t>());
        if (ds.sizes.empty()) throw ValidationError("dataset '" + ds.name + "' has no sizes");
        for (auto n : ds.sizes)
          if (n == 0) throw ValidationError("sample sizes must be positive");
      } else {
        ds.csv = resolve(d.at("csv").get<std::string>());
        require_file(*ds.csv);
        if (!d.contains("truth")) throw ValidationError("CSV dataset '" + ds.name + "' needs a 'truth' file");
        ds.sizes = {0};
      }
      if (d.contains("truth")) {
        ds.truth = resolve(d.at("truth").get<std::string>());
        require_file(*ds.truth);
      }
      for (const auto& s : d.at("seeds")) ds.seeds.push_back(s.get<Seed>());
      if (ds.seeds.empty()) throw ValidationError("dataset '" + ds.name + "' has no seeds");
      plan.datasets.push_back(std::move(ds));
    }
    if (plan.datasets.empty()) throw ValidationError("plan has no datasets");

    for (const auto& a : j.at("algorithms")) {
      AlgorithmSpec spec;
      if (a.is_string()) {
        spec.algorithm = parse_algorithm(a.get<std::string>());
      } else {
        spec.algorithm = parse_algorithm(a.at("algorithm").get<std::string>());
        if (a.contains("ci_test")) spec.ci_test = parse_ci_test(a.at("ci_test").get<std::string>());
        if (a.contains("alphas")) spec.alphas = number_list(a, "alphas");
        if (a.contains("gammas")) spec.gammas = number_list(a, "gammas");
        if (a.contains("isses")) spec.isses = number_list(a, "isses");
        if (a.contains("default_alpha")) spec.default_alpha = a.at("default_alpha").get<double>();
        if (a.contains("max_sepset")) spec.max_sepset = a.at("max_sepset").get<int>();
      }
      for (const auto& other : plan.algorithms)
        if (other.algorithm == spec.algorithm)
          throw ValidationError("algorithm '" + std::string(to_string(spec.algorithm)) + "' listed twice");
      plan.algorithms.push_back(std::move(spec));
    }
    if (plan.algorithms.empty()) throw ValidationError("plan has no algorithms");

    for (const auto& m : j.at("tuning")) {
      const TuningMethod method = parse_tuning_method(m.get<std::string>());
      if (std::find(plan.methods.begin(), plan.methods.end(), method) != plan.methods.end())
        throw ValidationError("duplicate tuning method '" + m.get<std::string>() + "'");
      plan.methods.push_back(method);
    }
    if (plan.methods.empty()) throw ValidationError("plan has no tuning methods");

    for (const auto& a : plan.algorithms)
      for (auto family : plan.families()) {
        a.default_config(family).validate();
        a.grid(family).expand();
      }
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed plan: ") + e.what());
  } catch (const ArgumentError& e) {
    throw ValidationError(std::string("invalid plan: ") + e.what());
  }
  return plan;
}

ExperimentPlan load_plan(const fs::path& path) {
  return ExperimentPlan::from_json(read_json_file(path), fs::absolute(path).parent_path());
}

std::string RunKey::id() const {
  std::ostringstream os;
  os << dataset << "_n" << size << "_s" << seed << "_" << to_string(algorithm) << "_" << to_string(method) << "_"
     << family_tag(family);
  return os.str();
}

std::vector<RunKey> enumerate_runs(const ExperimentPlan& plan) {
  std::vector<RunKey> keys;
  for (const auto& ds : plan.datasets)
    for (auto n : ds.sizes)
      for (auto seed : ds.seeds)
        for (const auto& algo : plan.algorithms)
          for (auto method : plan.methods)
            for (auto family : plan.families()) {
              if (method == TuningMethod::OtslEbic && family != TuningScore::EbicNormalised) continue;
              if (method == TuningMethod::OtslBdeu && family != TuningScore::Bdeu) continue;
              keys.push_back({ds.name, n, seed, algo.algorithm, method, family});
            }
  return keys;
}

ExperimentSummary run_experiment(const ExperimentPlan& plan, const ExperimentOptions& options) {
  fs::create_directories(runs_dir(plan));
  ExperimentSummary summary;
  std::map<std::string, LoadedDataset> loaded;
  const std::vector<RunKey> keys = enumerate_runs(plan);
  summary.runs = keys.size();

  for (const auto& key : keys) {
    const fs::path out = result_path(plan, key);
    if (fs::exists(out)) {
      ++summary.skipped;
      continue;
    }
    const DatasetSpec& ds = *std::find_if(plan.datasets.begin(), plan.datasets.end(),
                                          [&](const DatasetSpec& d) { return d.name == key.dataset; });
    const AlgorithmSpec& algo = *std::find_if(plan.algorithms.begin(), plan.algorithms.end(),
                                              [&](const AlgorithmSpec& a) { return a.algorithm == key.algorithm; });
    Json result;
    Json timing = Json::object();
    try {
      auto it = loaded.find(ds.name);
      if (it == loaded.end()) it = loaded.emplace(ds.name, load_dataset(ds)).first;
      result = execute_run(plan, algo, key, it->second, options, timing);
    } catch (const std::exception& e) {
      result = {{"key", key_to_json(key)}, {"status", "failed"}, {"error", e.what()}};
      ++summary.failed;
    }
    ++summary.executed;
    write_json_atomic(timing_path(plan, key), timing);
    write_json_atomic(out, result);
    if (options.log)
      *options.log << key.id() << ": " << result.at("status").get<std::string>()
                   << (result.contains("metrics") ? " f1=" + fmt(result["metrics"]["f1"].get<double>(), 4) : "")
                   << (result.contains("tuning") && result["tuning"].contains("fallback") ? " (tuning fell back to default)"
                                                                                        : "")
                   << "\n";
  }
  aggregate_results(plan);
  return summary;
}

Json aggregate_results(const ExperimentPlan& plan) {
  const std::vector<RunKey> keys = enumerate_runs(plan);
  std::vector<std::pair<RunKey, Json>> results;
  for (const auto& key : keys) {
    const fs::path p = result_path(plan, key);
    if (fs::exists(p)) results.emplace_back(key, read_json_file(p));
  }

  // Long-format per-run table.
  std::ostringstream runs_csv;
  runs_csv << "dataset,size,seed,algorithm,method,family,status,f1,precision,recall,shd,fallback,config\n";
  for (const auto& [key, r] : results) {
    runs_csv << key.dataset << "," << key.size << "," << key.seed << "," << to_string(key.algorithm) << ","
             << to_string(key.method) << "," << family_tag(key.family) << "," << r.at("status").get<std::string>();
    if (r.at("status") == "ok") {
      const Json& m = r.at("metrics");
      runs_csv << "," << fmt(m.at("f1").get<double>(), 6) << "," << fmt(m.at("precision").get<double>(), 6) << ","
               << fmt(m.at("recall").get<double>(), 6) << "," << m.at("shd").get<std::size_t>() << ","
               << (r.at("tuning").contains("fallback") ? "default" : "") << "," << r.at("config_label").get<std::string>();
    } else {
      runs_csv << ",,,,,,";
    }
    runs_csv << "\n";
  }
  write_text_atomic(plan.output / "runs.csv", runs_csv.str());

  using GroupKey = std::tuple<std::string, std::size_t, Algorithm, TuningMethod, TuningScore>;
  using OverallKey = std::tuple<Algorithm, TuningMethod, TuningScore>;
  std::map<GroupKey, Accumulator> groups;
  std::map<OverallKey, Accumulator> overall;
  for (const auto& [key, r] : results) {
    groups[{key.dataset, key.size, key.algorithm, key.method, key.family}].add(r);
    overall[{key.algorithm, key.method, key.family}].add(r);
  }

  Json summary;
  summary["runs_planned"] = keys.size();
  summary["runs_completed"] = results.size();
  std::size_t failed = 0;
  for (const auto& [key, r] : results)
    if (r.at("status") != "ok") ++failed;
  summary["runs_failed"] = failed;

  summary["groups"] = Json::array();
  for (const auto& [gk, acc] : groups) {
    const auto& [dataset, size, algorithm, method, family] = gk;
    summary["groups"].push_back({{"dataset", dataset},
                                 {"size", size},
                                 {"algorithm", std::string(to_string(algorithm))},
                                 {"method", std::string(to_string(method))},
                                 {"family", family_tag(family)},
                                 {"runs", acc.runs},
                                 {"failed", acc.failed},
                {"fallbacks", acc.fallbacks},
                                 {"fallbacks", acc.fallbacks},
                                 {"mean_f1", number_or_null(acc.mean_f1())},
                                 {"mean_shd", number_or_null(acc.mean_shd())}});
  }

  summary["overall"] = Json::array();
  for (const auto& [ok, acc] : overall) {
    const auto& [algorithm, method, family] = ok;
    Json row = {{"algorithm", std::string(to_string(algorithm))},
                {"method", std::string(to_string(method))},
                {"family", family_tag(family)},
                {"runs", acc.runs},
                {"failed", acc.failed},
                {"fallbacks", acc.fallbacks},
                {"mean_f1", number_or_null(acc.mean_f1())},
                {"mean_shd", number_or_null(acc.mean_shd())}};
    auto base = overall.find({algorithm, TuningMethod::None, family});
    if (method != TuningMethod::None && base != overall.end()) {
      row["f1_change"] = change_cell(acc.mean_f1(), base->second.mean_f1(), MetricSense::HigherIsBetter);
      row["shd_change"] = change_cell(acc.mean_shd(), base->second.mean_shd(), MetricSense::LowerIsBetter);
    }
    summary["overall"].push_back(row);
  }

  // Comparison tables: rows algorithms, columns tuning methods, cells the
  // change against the untuned default of the same score family.
  for (auto family : plan.families()) {
    std::vector<TuningMethod> columns;
    for (auto m : plan.methods) {
      if (m == TuningMethod::None) continue;
      if (m == TuningMethod::OtslEbic && family != TuningScore::EbicNormalised) continue;
      if (m == TuningMethod::OtslBdeu && family != TuningScore::Bdeu) continue;
      columns.push_back(m);
    }
    for (auto [metric, sense] : {std::pair{"f1", MetricSense::HigherIsBetter}, std::pair{"shd", MetricSense::LowerIsBetter}}) {
      std::ostringstream table;
      table << "algorithm";
      for (auto m : columns) table << "," << to_string(m);
      table << "\n";
      for (const auto& algo : plan.algorithms) {
        table << to_string(algo.algorithm);
        auto base = overall.find({algo.algorithm, TuningMethod::None, family});
        for (auto m : columns) {
          auto it = overall.find({algo.algorithm, m, family});
          if (base == overall.end() || it == overall.end()) {
            table << ",NA";
            continue;
          }
          const bool is_f1 = std::string(metric) == "f1";
          table << ","
                << change_cell(is_f1 ? it->second.mean_f1() : it->second.mean_shd(),
                               is_f1 ? base->second.mean_f1() : base->second.mean_shd(), sense);
        }
        table << "\n";
      }
      write_text_atomic(plan.output / (std::string(metric) + "_change_" + family_tag(family) + ".csv"), table.str());
    }
  }

  // Wall-clock is kept apart so every other output is reproducible.
  std::ostringstream timing_csv;
  timing_csv << "run,tune_seconds,learn_seconds\n";
  for (const auto& [key, r] : results) {
    const fs::path tp = timing_path(plan, key);
    if (!fs::exists(tp)) continue;
    const Json t = read_json_file(tp);
    if (!t.contains("tune_seconds")) continue;
    timing_csv << key.id() << "," << fmt(t.at("tune_seconds").get<double>(), 4) << ","
               << fmt(t.at("learn_seconds").get<double>(), 4) << "\n";
  }
  write_text_atomic(plan.output / "timing.csv", timing_csv.str());

  write_json_atomic(plan.output / "summary.json", summary);
  return summary;
}

}  // namespace bntune
