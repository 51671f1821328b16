// bntune: sample, learn, tune and evaluate discrete Bayesian network structures.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "bntune/bayes_net.hpp"
#include "bntune/error.hpp"
#include "bntune/eval.hpp"
#include "bntune/experiment.hpp"
#include "bntune/json_io.hpp"
#include "bntune/learn.hpp"
#include "bntune/tune.hpp"

namespace {

using namespace bntune;

enum ExitCode { kOk = 0, kUsage = 1, kValidation = 2, kRuntime = 3 };

struct ConfigFlags {
  std::string algo;
  std::optional<std::string> ci_test;
  std::optional<double> alpha;
  std::optional<std::string> score;
  std::optional<double> gamma;
  std::optional<double> iss;
  int max_sepset = -1;

  void add_to(CLI::App* app, bool require_algo = true) {
    auto* a = app->add_option("--algo", algo, "hc, pc-stable or mmhc");
    if (require_algo) a->required();
    app->add_option("--ci-test", ci_test, "chi2, mi or mi-sh");
    app->add_option("--alpha", alpha, "significance level");
    app->add_option("--score", score, "bic, aic, ebic, ebic-norm or bdeu");
    app->add_option("--gamma", gamma, "EBIC gamma (or gamma' for ebic-norm)");
    app->add_option("--iss", iss, "BDeu imaginary sample size");
    app->add_option("--max-sepset", max_sepset, "largest conditioning set, -1 for unlimited");
  }

  // Missing CI settings default to chi2 at 0.05 and a missing score to BIC,
  // but only for algorithms that use them.
  Config build(Seed seed) const {
    Config c;
    c.algorithm = parse_algorithm(algo);
    c.seed = seed;
    c.max_sepset = max_sepset;
    const bool uses_ci = c.algorithm != Algorithm::HillClimbing;
    const bool uses_score = c.algorithm != Algorithm::PcStable;
    if (ci_test || uses_ci) c.ci_test = parse_ci_test(ci_test.value_or("chi2"));
    if (alpha || uses_ci) c.alpha = alpha.value_or(0.05);
    if (score || gamma || iss || uses_score) {
      ScoreKind kind = parse_score_kind(score.value_or(iss ? "bdeu" : gamma ? "ebic" : "bic"));
      if (gamma && kind != ScoreKind::Ebic && kind != ScoreKind::EbicNormalised)
        throw ArgumentError("--gamma needs --score ebic or ebic-norm");
      if (iss && kind != ScoreKind::Bdeu) throw ArgumentError("--iss needs --score bdeu");
      const double parameter = kind == ScoreKind::Bdeu ? iss.value_or(1.0) : gamma.value_or(0.0);
      c.score = ScoreSpec::make(kind, parameter);
    }
    c.validate();
    return c;
  }
};

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  write_text_atomic(path, text);
}

std::vector<std::string> node_names(const CategoricalDataset& d) { return d.schema().names(); }

// Truth from network JSON or Graph JSON, aligned to `nodes`.
Dag load_truth(const std::string& path, const std::vector<std::string>& nodes, Seed seed) {
  const Json j = read_json_file(path);
  std::vector<std::string> truth_nodes;
  Dag truth;
  if (j.contains("variables")) {
    const BayesNet bn = bayes_net_from_json(j);
    truth_nodes = bn.schema().names();
    truth = bn.dag();
  } else {
    const GraphDocument doc = graph_from_json(j);
    truth_nodes = doc.nodes;
    truth = doc.to_dag(seed);
  }
  if (truth_nodes.size() != nodes.size()) throw ValidationError("learned and true graphs have different node sets");
  std::vector<std::size_t> map(truth_nodes.size());
  for (std::size_t i = 0; i < truth_nodes.size(); ++i) {
    auto it = std::find(nodes.begin(), nodes.end(), truth_nodes[i]);
    if (it == nodes.end()) throw ValidationError("true node '" + truth_nodes[i] + "' missing from learned graph");
    map[i] = static_cast<std::size_t>(it - nodes.begin());
  }
  std::vector<Arc> arcs;
  for (auto [u, v] : truth.arcs()) arcs.emplace_back(map[u], map[v]);
  return Dag::from_arcs(nodes.size(), arcs);
}

int cmd_sample(const std::string& network, const std::string& out, std::size_t n, Seed seed,
               const RandomNetworkOptions& random, bool use_random, const std::string& network_out) {
  if (n == 0) throw ArgumentError("-n must be at least 1");
  if (network.empty() == !use_random) throw ArgumentError("give exactly one of --network or --random");
  const BayesNet bn = use_random ? random_bayes_net(random) : load_bayes_net(network);
  if (!network_out.empty()) write_json_atomic(network_out, bayes_net_to_json(bn));
  std::ostringstream os;
  write_csv(os, forward_sample(bn, n, seed));
  write_output(out, os.str());
  return kOk;
}

int cmd_learn(const std::string& data_path, const ConfigFlags& flags, Seed seed, const std::string& out, int threads) {
  const Config config = flags.build(seed);
  const CategoricalDataset data = load_csv(data_path);
  HillClimbOptions options;
  options.execution = Execution::Parallel;
  options.threads = threads;
  const LearnOutput result = learn(data, config, options);
  Json j = graph_to_json(node_names(data), result);
  j["config"] = config_to_json(config);
  j["stats"] = {{"score_evaluations", result.stats.score_evaluations},
                {"ci_tests", result.stats.ci_tests},
                {"elapsed_seconds", result.stats.elapsed_seconds}};
  write_output(out, j.dump(2) + "\n");
  return kOk;
}

struct TuneFlags {
  std::string tuning_score = "ebic";
  std::size_t k = 10;
  std::optional<std::size_t> train_cap;
  std::optional<std::size_t> test_cap;
  std::optional<double> gamma_max;
  std::vector<double> alphas;
  std::vector<double> gammas;
  std::vector<double> isses;
  std::optional<std::string> ci_test;
  int max_sepset = -1;
  std::string truth;
  std::string curve;
  bool serial = false;
  bool no_timing = false;
};

int cmd_tune(const std::string& data_path, const std::string& algo, const TuneFlags& f, Seed seed,
             std::optional<double> timeout, const std::string& out, int threads) {
  const TuningScore family = parse_tuning_score(f.tuning_score);
  ConfigGrid grid = ConfigGrid::standard(parse_algorithm(algo), family);
  if (f.ci_test) {
    if (!grid.base.ci_test) throw ArgumentError("--ci-test does not apply to " + algo);
    grid.base.ci_test = parse_ci_test(*f.ci_test);
  }
  grid.base.max_sepset = f.max_sepset;
  if (!f.alphas.empty()) grid.alphas = f.alphas;
  if (!f.gammas.empty()) {
    if (family != TuningScore::EbicNormalised) throw ArgumentError("--gammas needs --tuning-score ebic");
    grid.gammas = f.gammas;
  }
  if (!f.isses.empty()) {
    if (family != TuningScore::Bdeu) throw ArgumentError("--isses needs --tuning-score bdeu");
    grid.isses = f.isses;
  }
  grid.expand();

  const CategoricalDataset data = load_csv(data_path);
  TuneOptions options;
  options.folds = f.k;
  options.tuning_score = family;
  options.seed = seed;
  options.train_cap = f.train_cap;
  options.test_cap = f.test_cap;
  options.gamma_max = f.gamma_max;
  options.execution = f.serial ? Execution::Serial : Execution::Parallel;
  options.threads = threads;
  options.timeout_seconds = timeout;
  const TuningReport report = otsl(data, grid, options);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";
  std::cerr << "chosen: " << report.chosen.label() << "\n";

  if (!f.curve.empty()) {
    // Plot-ready curve: one line per configuration; with a truth graph each
    // configuration is also learned on the full data and scored against it.
    std::optional<Dag> truth;
    if (!f.truth.empty()) truth = load_truth(f.truth, node_names(data), seed);
    std::ostringstream csv;
    csv << "index,label,alpha,gamma,iss,mean_score,failed";
    if (truth) csv << ",f1,shd";
    csv << "\n";
    for (std::size_t c = 0; c < report.per_config.size(); ++c) {
      const auto& r = report.per_config[c];
      const Config& cfg = r.config;
      csv << c << ",\"" << cfg.label() << "\"," << (cfg.alpha ? std::to_string(*cfg.alpha) : "") << ","
          << (cfg.score && cfg.score->has_gamma() ? std::to_string(cfg.score->gamma) : "") << ","
          << (cfg.score && cfg.score->has_iss() ? std::to_string(cfg.score->iss) : "") << ",";
      if (r.failed)
        csv << ",1";
      else {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", r.mean_score);
        csv << buf << ",0";
      }
      if (truth) {
        const Dag g = learn(data, cfg).to_dag(extension_seed(seed, 0), ExtensionPolicy::BestEffort);
        const GraphMetrics m = f1_score(g, *truth);
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.6f", m.f1);
        csv << "," << buf << "," << m.shd;
      }
      csv << "\n";
    }
    write_text_atomic(f.curve, csv.str());
  }

  write_output(out, report_to_json(report, !f.no_timing).dump(2) + "\n");
  return kOk;
}

int cmd_eval(const std::string& learned_path, const std::string& truth_path, Seed seed, const std::string& policy,
             const std::string& format, const std::string& out) {
  const GraphDocument learned = graph_from_json(read_json_file(learned_path));
  ExtensionPolicy p;
  if (policy == "strict")
    p = ExtensionPolicy::Strict;
  else if (policy == "best-effort")
    p = ExtensionPolicy::BestEffort;
  else
    throw ArgumentError("--policy must be strict or best-effort");
  const Dag g = learned.to_dag(seed, p);
  const Dag truth = load_truth(truth_path, learned.nodes, seed);
  const GraphMetrics m = f1_score(g, truth);
  if (format == "json") {
    write_output(out, metrics_to_json(m).dump(2) + "\n");
  } else if (format == "csv") {
    char buf[256];
    std::snprintf(buf, sizeof buf, "tp,fp,fn,precision,recall,f1,shd\n%zu,%zu,%zu,%.6f,%.6f,%.6f,%zu\n", m.tp, m.fp,
                  m.fn, m.precision, m.recall, m.f1, m.shd);
    write_output(out, buf);
  } else {
    throw ArgumentError("--format must be json or csv");
  }
  return kOk;
}

int cmd_experiment(const std::string& plan_path, std::optional<double> timeout, bool serial, bool quiet,
                   int threads) {
  ExperimentPlan plan = load_plan(plan_path);
  if (timeout) plan.timeout_seconds = timeout;
  ExperimentOptions options;
  options.execution = serial ? Execution::Serial : Execution::Parallel;
  options.threads = threads;
  options.log = quiet ? nullptr : &std::cerr;
  const ExperimentSummary s = run_experiment(plan, options);
  std::cout << "runs " << s.runs << ", executed " << s.executed << ", skipped " << s.skipped << ", failed "
            << s.failed << "\n"
            << "results in " << plan.output.string() << "\n";
  return kOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Structure learning with out-of-sample hyperparameter tuning"};
  app.require_subcommand(1);
  int threads = 0;
  app.add_option("--threads", threads, "worker threads, 0 for BN_TUNE_THREADS or all cores");

  Seed seed = 0;
  std::string out;
  std::optional<double> timeout;

  auto* sample = app.add_subcommand("sample", "draw a dataset from a network");
  std::string network, network_out;
  std::size_t n = 0;
  bool use_random = false;
  RandomNetworkOptions random;
  sample->add_option("--network", network, "network JSON");
  sample->add_option("-n", n, "number of rows")->required();
  sample->add_option("--seed", seed);
  sample->add_option("-o,--out", out, "CSV output, stdout when omitted");
  sample->add_flag("--random", use_random, "sample from a random network instead");
  sample->add_option("--nodes", random.nodes);
  sample->add_option("--max-parents", random.max_parents);
  sample->add_option("--max-states", random.max_states);
  sample->add_option("--density", random.density);
  sample->add_option("--sharpness", random.sharpness);
  sample->add_option("--network-seed", random.seed);
  sample->add_option("--network-out", network_out, "also write the network JSON");

  auto* learn_cmd = app.add_subcommand("learn", "learn a structure from CSV data");
  std::string data;
  ConfigFlags config_flags;
  learn_cmd->add_option("data", data, "CSV file")->required();
  config_flags.add_to(learn_cmd);
  learn_cmd->add_option("--seed", seed);
  learn_cmd->add_option("-o,--out", out);

  auto* tune = app.add_subcommand("tune", "out-of-sample hyperparameter tuning");
  std::string algo;
  TuneFlags tf;
  tune->add_option("data", data, "CSV file")->required();
  tune->add_option("--algo", algo, "hc, pc-stable or mmhc")->required();
  tune->add_option("--tuning-score", tf.tuning_score, "ebic or bdeu");
  tune->add_option("--k", tf.k, "number of resampling folds");
  tune->add_option("--train-cap", tf.train_cap);
  tune->add_option("--test-cap", tf.test_cap);
  tune->add_option("--gamma-max", tf.gamma_max, "normalising gamma, default the grid maximum");
  tune->add_option("--alphas", tf.alphas, "override the alpha axis")->delimiter(',');
  tune->add_option("--gammas", tf.gammas, "override the gamma axis")->delimiter(',');
  tune->add_option("--isses", tf.isses, "override the iss axis")->delimiter(',');
  tune->add_option("--ci-test", tf.ci_test);
  tune->add_option("--max-sepset", tf.max_sepset);
  tune->add_option("--truth", tf.truth, "true network or graph, used by --curve");
  tune->add_option("--curve", tf.curve, "write a per-configuration CSV");
  tune->add_flag("--serial", tf.serial, "evaluate the grid on one thread");
  tune->add_flag("--no-timing", tf.no_timing, "omit wall-clock fields from the report");
  tune->add_option("--seed", seed);
  tune->add_option("--timeout", timeout, "seconds; cells not started by then count as failed");
  tune->add_option("-o,--out", out);

  auto* eval = app.add_subcommand("eval", "compare a learned graph against the truth");
  std::string learned, truth, policy = "best-effort", format = "json";
  eval->add_option("learned", learned, "Graph JSON")->required();
  eval->add_option("truth", truth, "network JSON or Graph JSON")->required();
  eval->add_option("--seed", seed, "seed for completing CPDAG/PDAG input");
  eval->add_option("--policy", policy, "strict or best-effort extension");
  eval->add_option("--format", format, "json or csv");
  eval->add_option("-o,--out", out);

  auto* experiment = app.add_subcommand("experiment", "run an experiment plan");
  std::string plan;
  bool serial = false, quiet = false;
  experiment->add_option("plan", plan, "plan JSON")->required();
  experiment->add_option("--timeout", timeout, "per-tuning budget in seconds");
  experiment->add_flag("--serial", serial);
  experiment->add_flag("--quiet", quiet);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kOk : kUsage;
  }

  try {
    if (*sample) return cmd_sample(network, out, n, seed, random, use_random, network_out);
    if (*learn_cmd) return cmd_learn(data, config_flags, seed, out, threads);
    if (*tune) return cmd_tune(data, algo, tf, seed, timeout, out, threads);
    if (*eval) return cmd_eval(learned, truth, seed, policy, format, out);
    if (*experiment) return cmd_experiment(plan, timeout, serial, quiet, threads);
  } catch (const ArgumentError& e) {
    std::cerr << "usage error: " << e.what() << "\n";
    return kUsage;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return kValidation;
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return kValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntime;
  }
  return kUsage;
}
