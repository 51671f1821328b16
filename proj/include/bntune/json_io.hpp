#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "bntune/bayes_net.hpp"
#include "bntune/eval.hpp"
#include "bntune/graph.hpp"
#include "bntune/learn.hpp"
#include "bntune/tune.hpp"
#include "json.hpp"

namespace bntune {

using Json = nlohmann::json;

/// Parsed Graph JSON: {"nodes": [...], "kind": "DAG|CPDAG|PDAG",
/// "directed": [[from, to], ...], "undirected": [[u, v], ...]}. Edge ends are
/// node names; integer indices are accepted on input.
struct GraphDocument {
  std::vector<std::string> nodes;
  GraphKind kind = GraphKind::Dag;
  Pdag graph;

  /// The graph itself when it is a DAG, else a consistent extension.
  Dag to_dag(Seed seed, ExtensionPolicy policy = ExtensionPolicy::Strict) const;
};

Json graph_to_json(const std::vector<std::string>& nodes, const Dag& g);
Json graph_to_json(const std::vector<std::string>& nodes, const Pdag& g, GraphKind kind);
Json graph_to_json(const std::vector<std::string>& nodes, const LearnOutput& out);
/// Without a "kind" tag the graph is a DAG when it has no undirected edges.
GraphDocument graph_from_json(const Json& j);

Json bayes_net_to_json(const BayesNet& bn);
BayesNet bayes_net_from_json(const Json& j);
BayesNet load_bayes_net(const std::filesystem::path& path);

Json config_to_json(const Config& c);
Config config_from_json(const Json& j);

/// Timing fields are wall-clock and differ between runs; leave them out to
/// get a document that is a pure function of the inputs.
Json report_to_json(const TuningReport& report, bool include_timing = true);

Json metrics_to_json(const GraphMetrics& m);

/// Throws ParseError with the file name on malformed input.
Json read_json_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_text_atomic(const std::filesystem::path& path, const std::string& text);
void write_json_atomic(const std::filesystem::path& path, const Json& j);

}  // namespace bntune
