#pragma once

// Shared fixtures for the unit tests and the acceptance runner.

#include <cstddef>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bntune/bayes_net.hpp"
#include "bntune/dataset.hpp"
#include "bntune/graph.hpp"
#include "bntune/json_io.hpp"
#include "bntune/rng.hpp"

namespace bntune::testing {

inline std::filesystem::path source_dir() { return BNTUNE_SOURCE_DIR; }
inline std::filesystem::path network_path(const std::string& name) {
  return source_dir() / "data" / "networks" / (name + ".json");
}

inline Json frozen_values() { return read_json_file(source_dir() / "tests" / "oracles" / "frozen_values.json"); }

/// Schema with variables V0..V{k-1} and the given cardinalities.
inline Schema make_schema(const std::vector<std::size_t>& cards) {
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < cards.size(); ++i) {
    Variable v{"V" + std::to_string(i), {}};
    for (std::size_t s = 0; s < cards[i]; ++s) v.states.push_back("s" + std::to_string(s));
    vars.push_back(std::move(v));
  }
  return Schema(std::move(vars));
}

/// Dataset from row-major tuples.
inline CategoricalDataset from_rows(const std::vector<std::size_t>& cards, const std::vector<std::vector<int>>& rows) {
  std::vector<std::vector<State>> cols(cards.size());
  for (const auto& r : rows)
    for (std::size_t v = 0; v < cards.size(); ++v) cols[v].push_back(static_cast<State>(r[v]));
  return CategoricalDataset(make_schema(cards), std::move(cols));
}

/// Two binary columns whose joint counts match `counts`.
inline CategoricalDataset from_table(const std::vector<std::vector<int>>& counts) {
  std::vector<std::vector<int>> rows;
  for (std::size_t a = 0; a < counts.size(); ++a)
    for (std::size_t b = 0; b < counts[a].size(); ++b)
      for (int i = 0; i < counts[a][b]; ++i) rows.push_back({static_cast<int>(a), static_cast<int>(b)});
  return from_rows({counts.size(), counts[0].size()}, rows);
}

/// Uniform random data, every column guaranteed to use all of its states.
inline CategoricalDataset uniform_data(const std::vector<std::size_t>& cards, std::size_t n, Seed seed) {
  Rng rng(seed);
  std::vector<std::vector<State>> cols(cards.size(), std::vector<State>(n));
  for (std::size_t v = 0; v < cards.size(); ++v)
    for (std::size_t r = 0; r < n; ++r)
      cols[v][r] = static_cast<State>(r < cards[v] ? r : rng.uniform_index(cards[v]));
  return CategoricalDataset(make_schema(cards), std::move(cols));
}

/// Data sampled from a random network, so columns are dependent.
inline CategoricalDataset network_data(std::size_t nodes, std::size_t n, Seed seed, std::size_t max_states = 3,
                                       double density = 1.0) {
  RandomNetworkOptions o;
  o.nodes = nodes;
  o.max_states = max_states;
  o.density = density;
  o.sharpness = 2.0;
  o.seed = seed;
  return forward_sample(random_bayes_net(o), n, derive_seed(seed, {7}));
}

/// Random DAG: arcs respect a random order, each present with probability p.
inline Dag random_dag(std::size_t n, double p, Rng& rng) {
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j)
      if (rng.uniform01() < p) arcs.emplace_back(order[i], order[j]);
  return Dag::from_arcs(n, arcs);
}

/// Every DAG on n labelled nodes (n <= 4), by brute force over the
/// three-state assignment of each unordered pair.
inline std::vector<Dag> all_dags(std::size_t n) {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
  std::size_t total = 1;
  for (std::size_t i = 0; i < pairs.size(); ++i) total *= 3;
  std::vector<Dag> out;
  for (std::size_t code = 0; code < total; ++code) {
    std::vector<Arc> arcs;
    std::size_t c = code;
    for (auto [i, j] : pairs) {
      const std::size_t t = c % 3;
      c /= 3;
      if (t == 1) arcs.emplace_back(i, j);
      if (t == 2) arcs.emplace_back(j, i);
    }
    if (is_acyclic(n, arcs)) out.push_back(Dag::from_arcs(n, arcs));
  }
  return out;
}

}  // namespace bntune::testing
