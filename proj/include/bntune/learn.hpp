#pragma once

#include <cstddef>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "bntune/citest.hpp"
#include "bntune/dataset.hpp"
#include "bntune/graph.hpp"
#include "bntune/parallel.hpp"
#include "bntune/rng.hpp"
#include "bntune/score.hpp"

namespace bntune {

enum class Algorithm { HillClimbing, PcStable, Mmhc };

std::string_view to_string(Algorithm algorithm);
/// Accepts "hc", "pc-stable", "mmhc".
Algorithm parse_algorithm(std::string_view name);

/// One hyperparameter configuration of a structure learner.
/// PcStable needs ci_test + alpha and no score; HillClimbing needs a score and
/// no CI test; Mmhc needs all three.
struct Config {
  Algorithm algorithm = Algorithm::HillClimbing;
  std::optional<CiTestKind> ci_test;
  std::optional<double> alpha;
  std::optional<ScoreSpec> score;
  int max_sepset = -1;  // -1: unlimited conditioning-set size
  Seed seed = 0;

  /// Throws ArgumentError when the fields do not match the algorithm.
  void validate() const;
  std::string label() const;

  friend bool operator==(const Config&, const Config&) = default;
};

enum class GraphKind { Dag, Cpdag, Pdag };

std::string_view to_string(GraphKind kind);

struct LearnStats {
  std::size_t score_evaluations = 0;
  std::size_t ci_tests = 0;
  double elapsed_seconds = 0.0;
  /// Hill-climbing score after the start graph and after every accepted move.
  std::vector<double> score_trace;
};

struct LearnOutput {
  GraphKind kind = GraphKind::Dag;
  std::variant<Dag, Pdag> graph;
  LearnStats stats;

  const Dag& dag() const { return std::get<Dag>(graph); }
  const Pdag& pdag() const { return std::get<Pdag>(graph); }
  /// The learned graph as a DAG, extending PDAG/CPDAG output with `seed`.
  Dag to_dag(Seed seed, ExtensionPolicy policy = ExtensionPolicy::Strict) const;
};

/// allowed[child] = nodes permitted as parents of child.
using ParentRestriction = std::vector<std::vector<std::size_t>>;

struct HillClimbOptions {
  Execution execution = Execution::Serial;
  int threads = 0;
  LocalScoreCache* cache = nullptr;  // a private cache is used when null
};

/// Smallest improvement accepted by hill climbing.
inline constexpr double kMinImprovement = 1e-9;

/// Greedy hill climbing from the empty graph over add/delete/reverse moves.
/// Applies the best-improving move each step; equal gains are resolved by the
/// smallest (operator, from, to) with add < delete < reverse. Stops when no
/// move improves the score by more than kMinImprovement.
LearnOutput hill_climb(const CategoricalDataset& data, const ScoreSpec& spec,
                       const std::optional<ParentRestriction>& restrict = std::nullopt, Seed seed = 0,
                       const HillClimbOptions& options = {});

/// Order-independent PC: conditioning sets at each level are drawn from the
/// adjacencies frozen at the start of that level. Output is the skeleton with
/// v-structures oriented and Meek's rules applied.
LearnOutput pc_stable(const CategoricalDataset& data, CiTestKind test, double alpha, int max_sepset = -1);

/// Skeleton phase of pc_stable alone (adjacency lists and separating sets).
struct SkeletonResult {
  Pdag skeleton;  // all edges undirected
  std::map<std::pair<std::size_t, std::size_t>, std::vector<std::size_t>> sepsets;  // key (u, v), u < v
  std::size_t ci_tests = 0;
};
SkeletonResult pc_stable_skeleton(CiTester& tester, std::size_t nodes, int max_sepset);

/// Max-min parents and children of every node, symmetrized by intersection.
ParentRestriction mmpc(const CategoricalDataset& data, CiTestKind test, double alpha, int max_sepset = -1,
                       std::size_t* ci_tests = nullptr);

/// MMPC restriction followed by hill climbing within it (an arc i -> j is
/// allowed in either direction when i and j are MMPC-adjacent).
LearnOutput mmhc(const CategoricalDataset& data, CiTestKind test, double alpha, const ScoreSpec& spec, Seed seed = 0,
                 int max_sepset = -1, const HillClimbOptions& options = {});

/// Runs the learner named by `config`.
LearnOutput learn(const CategoricalDataset& data, const Config& config, const HillClimbOptions& options = {});

}  // namespace bntune
