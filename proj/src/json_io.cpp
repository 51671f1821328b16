#include "bntune/json_io.hpp"

#include <cmath>
#include <fstream>
#include <map>
#include <sstream>

#include "bntune/error.hpp"

namespace bntune {

namespace {

std::size_t node_ref(const Json& v, const std::map<std::string, std::size_t>& index) {
  if (v.is_string()) {
    auto it = index.find(v.get<std::string>());
    if (it == index.end()) throw ValidationError("unknown node '" + v.get<std::string>() + "'");
    return it->second;
  }
  if (v.is_number_unsigned() || v.is_number_integer()) {
    const auto i = v.get<std::int64_t>();
    if (i < 0 || static_cast<std::size_t>(i) >= index.size()) throw ValidationError("node index out of range");
    return static_cast<std::size_t>(i);
  }
  throw ValidationError("edge ends must be node names or indices");
}

std::vector<std::pair<std::size_t, std::size_t>> edge_list(const Json& j, const char* key,
                                                            const std::map<std::string, std::size_t>& index) {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  if (!j.contains(key)) return out;
  for (const auto& e : j.at(key)) {
    if (!e.is_array() || e.size() != 2) throw ValidationError(std::string("entries of '") + key + "' must be pairs");
    out.emplace_back(node_ref(e[0], index), node_ref(e[1], index));
  }
  return out;
}

GraphKind parse_graph_kind(const std::string& s) {
  for (auto k : {GraphKind::Dag, GraphKind::Cpdag, GraphKind::Pdag})
    if (to_string(k) == s) return k;
  throw ValidationError("unknown graph kind '" + s + "'");
}

Json fold_to_json(const FoldResult& f, std::size_t k, bool include_timing) {
  Json j;
  j["fold"] = k + 1;
  j["ok"] = f.ok;
  if (f.ok) {
    j["score"] = f.score;
    j["kind"] = std::string(to_string(f.kind));
    j["arcs"] = f.arcs;
    j["free_parameters"] = f.free_parameters;
  } else {
    j["error"] = f.error;
  }
  if (include_timing) {
    j["learn_seconds"] = f.learn_seconds;
    j["score_seconds"] = f.score_seconds;
  }
  return j;
}

}  // namespace

Dag GraphDocument::to_dag(Seed seed, ExtensionPolicy policy) const {
  if (kind == GraphKind::Dag) return Dag::from_arcs(graph.size(), graph.directed_arcs());
  return pdag_to_dag(graph, seed, policy);
}

Json graph_to_json(const std::vector<std::string>& nodes, const Dag& g) {
  return graph_to_json(nodes, Pdag::from_dag(g), GraphKind::Dag);
}

Json graph_to_json(const std::vector<std::string>& nodes, const Pdag& g, GraphKind kind) {
  if (nodes.size() != g.size()) throw ArgumentError("node names do not match graph size");
  Json j;
  j["nodes"] = nodes;
  j["kind"] = std::string(to_string(kind));
  j["directed"] = Json::array();
  for (const auto& [u, v] : g.directed_arcs()) j["directed"].push_back({nodes[u], nodes[v]});
  j["undirected"] = Json::array();
  for (const auto& [u, v] : g.undirected_edges()) j["undirected"].push_back({nodes[u], nodes[v]});
  return j;
}

Json graph_to_json(const std::vector<std::string>& nodes, const LearnOutput& out) {
  if (out.kind == GraphKind::Dag) return graph_to_json(nodes, out.dag());
  return graph_to_json(nodes, out.pdag(), out.kind);
}

GraphDocument graph_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("nodes")) throw ValidationError("graph JSON needs a 'nodes' list");
  GraphDocument doc;
  std::map<std::string, std::size_t> index;
  for (const auto& n : j.at("nodes")) {
    if (!n.is_string()) throw ValidationError("node names must be strings");
    if (!index.emplace(n.get<std::string>(), doc.nodes.size()).second)
      throw ValidationError("duplicate node '" + n.get<std::string>() + "'");
    doc.nodes.push_back(n.get<std::string>());
  }
  doc.graph = Pdag(doc.nodes.size());
  auto place = [&](std::size_t u, std::size_t v, bool directed) {
    if (u == v) throw ValidationError("self loop on '" + doc.nodes[u] + "'");
    if (doc.graph.adjacent(u, v))
      throw ValidationError("duplicate edge between '" + doc.nodes[u] + "' and '" + doc.nodes[v] + "'");
    directed ? doc.graph.set_directed(u, v) : doc.graph.set_undirected(u, v);
  };
  for (auto [u, v] : edge_list(j, "directed", index)) place(u, v, true);
  const auto undirected = edge_list(j, "undirected", index);
  for (auto [u, v] : undirected) place(u, v, false);

  if (j.contains("kind"))
    doc.kind = parse_graph_kind(j.at("kind").get<std::string>());
  else
    doc.kind = undirected.empty() ? GraphKind::Dag : GraphKind::Pdag;
  if (doc.kind == GraphKind::Dag) {
    if (!undirected.empty()) throw ValidationError("a DAG cannot have undirected edges");
    if (!is_acyclic(doc.graph.size(), doc.graph.directed_arcs())) throw ValidationError("DAG has a cycle");
  }
  return doc;
}

Json bayes_net_to_json(const BayesNet& bn) {
  Json j;
  j["variables"] = Json::array();
  j["parents"] = Json::object();
  j["cpts"] = Json::object();
  const auto& schema = bn.schema();
  for (std::size_t i = 0; i < bn.size(); ++i) {
    const auto& v = schema.variable(i);
    j["variables"].push_back({{"name", v.name}, {"states", v.states}});
    Json ps = Json::array();
    for (auto p : bn.parents(i)) ps.push_back(schema.variable(p).name);
    j["parents"][v.name] = ps;
    j["cpts"][v.name] = bn.cpt(i);
  }
  return j;
}

BayesNet bayes_net_from_json(const Json& j) {
  try {
    std::vector<Variable> vars;
    for (const auto& v : j.at("variables"))
      vars.push_back({v.at("name").get<std::string>(), v.at("states").get<std::vector<std::string>>()});
    Schema schema(std::move(vars));
    std::vector<std::vector<std::size_t>> parents(schema.size());
    std::vector<std::vector<double>> cpts(schema.size());
    const Json& pj = j.at("parents");
    const Json& cj = j.at("cpts");
    for (std::size_t i = 0; i < schema.size(); ++i) {
      const std::string& name = schema.variable(i).name;
      if (pj.contains(name)) {
        for (const auto& p : pj.at(name)) {
          auto idx = schema.index_of(p.get<std::string>());
          if (!idx) throw ValidationError("unknown parent '" + p.get<std::string>() + "' of '" + name + "'");
          parents[i].push_back(*idx);
        }
      }
      if (!cj.contains(name)) throw ValidationError("missing CPT for '" + name + "'");
      // Accept a flat array or a list of rows.
      for (const auto& e : cj.at(name)) {
        if (e.is_array())
          for (const auto& x : e) cpts[i].push_back(x.get<double>());
        else
          cpts[i].push_back(e.get<double>());
      }
    }
    for (const auto& [key, value] : pj.items())
      if (!schema.index_of(key)) throw ValidationError("parents given for unknown variable '" + key + "'");
    return BayesNet(std::move(schema), std::move(parents), std::move(cpts));
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed network JSON: ") + e.what());
  }
}

BayesNet load_bayes_net(const std::filesystem::path& path) { return bayes_net_from_json(read_json_file(path)); }

Json config_to_json(const Config& c) {
  Json j;
  j["algorithm"] = std::string(to_string(c.algorithm));
  if (c.ci_test) j["ci_test"] = std::string(to_string(*c.ci_test));
  if (c.alpha) j["alpha"] = *c.alpha;
  if (c.score) {
    Json s;
    s["kind"] = std::string(to_string(c.score->kind));
    switch (c.score->kind) {
      case ScoreKind::Ebic: s["gamma"] = c.score->gamma; break;
      case ScoreKind::EbicNormalised: s["gamma_prime"] = c.score->gamma_prime; break;
      case ScoreKind::Bdeu: s["iss"] = c.score->iss; break;
      default: break;
    }
    j["score"] = s;
  }
  j["max_sepset"] = c.max_sepset;
  return j;
}

Config config_from_json(const Json& j) {
  try {
    Config c;
    c.algorithm = parse_algorithm(j.at("algorithm").get<std::string>());
    if (j.contains("ci_test")) c.ci_test = parse_ci_test(j.at("ci_test").get<std::string>());
    if (j.contains("alpha")) c.alpha = j.at("alpha").get<double>();
    if (j.contains("score")) {
      const Json& s = j.at("score");
      const ScoreKind kind = parse_score_kind(s.at("kind").get<std::string>());
      double parameter = 0.0;
      for (const char* key : {"gamma", "gamma_prime", "iss"})
        if (s.contains(key)) parameter = s.at(key).get<double>();
      if (kind == ScoreKind::Bdeu && !s.contains("iss")) parameter = 1.0;
      c.score = ScoreSpec::make(kind, parameter);
    }
    if (j.contains("max_sepset")) c.max_sepset = j.at("max_sepset").get<int>();
    if (j.contains("seed")) c.seed = j.at("seed").get<Seed>();
    c.validate();
    return c;
  } catch (const Json::exception& e) {
    throw ValidationError(std::string("malformed configuration JSON: ") + e.what());
  }
}

Json report_to_json(const TuningReport& report, bool include_timing) {
  Json j;
  j["tuning_score"] = std::string(to_string(report.tuning_score));
  j["folds"] = report.folds;
  j["seed"] = report.seed;
  j["train_size"] = report.sizes.train;
  j["test_size"] = report.sizes.test;
  j["gamma_max"] = report.gamma_max;
  j["chosen_index"] = report.chosen_index;
  j["chosen"] = config_to_json(report.chosen);
  j["grid"] = Json::array();
  for (const auto& r : report.per_config) {
    Json c;
    c["config"] = config_to_json(r.config);
    c["label"] = r.config.label();
    c["failed"] = r.failed;
    c["mean_score"] = r.failed ? Json(nullptr) : Json(r.mean_score);
    c["folds"] = Json::array();
    for (std::size_t k = 0; k < r.folds.size(); ++k) c["folds"].push_back(fold_to_json(r.folds[k], k, include_timing));
    j["grid"].push_back(c);
  }
  j["warnings"] = report.warnings;
  if (include_timing) {
    double learn = 0.0, score = 0.0;
    for (const auto& r : report.per_config)
      for (const auto& f : r.folds) {
        learn += f.learn_seconds;
        score += f.score_seconds;
      }
    j["timing"] = {{"split_seconds", report.split_seconds},
                   {"grid_seconds", report.grid_seconds},
                   {"total_seconds", report.total_seconds},
                   {"learn_seconds_sum", learn},
                   {"score_seconds_sum", score}};
  }
  return j;
}

Json metrics_to_json(const GraphMetrics& m) {
  return {{"tp", m.tp},
          {"fp", m.fp},
          {"fn", m.fn},
          {"precision", m.precision},
          {"recall", m.recall},
          {"f1", m.f1},
          {"shd", m.shd}};
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  try {
    return Json::parse(in);
  } catch (const Json::parse_error& e) {
    throw ParseError("'" + path.string() + "': " + e.what());
  }
}

void write_text_atomic(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << text;
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  std::filesystem::rename(tmp, path);
}

void write_json_atomic(const std::filesystem::path& path, const Json& j) { write_text_atomic(path, j.dump(2) + "\n"); }

}  // namespace bntune
