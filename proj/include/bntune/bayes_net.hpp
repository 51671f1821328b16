#pragma once

#include <cstddef>
#include <vector>

#include "bntune/dataset.hpp"
#include "bntune/graph.hpp"
#include "bntune/rng.hpp"

namespace bntune {

/// Discrete Bayesian network. `cpts[i]` is row-major with one row of
/// cardinality(i) probabilities per parent configuration; configurations are
/// enumerated in mixed radix over `parents[i]` in the listed order, last
/// parent varying fastest.
class BayesNet {
 public:
  BayesNet() = default;
  /// Throws ValidationError on a cycle, bad shapes, or a row whose sum is off
  /// by more than 1e-9.
  BayesNet(Schema schema, std::vector<std::vector<std::size_t>> parents, std::vector<std::vector<double>> cpts);

  const Schema& schema() const noexcept { return schema_; }
  std::size_t size() const noexcept { return schema_.size(); }
  const std::vector<std::size_t>& parents(std::size_t i) const { return parents_.at(i); }
  const std::vector<double>& cpt(std::size_t i) const { return cpts_.at(i); }
  /// Number of parent configurations of node i.
  std::size_t configurations(std::size_t i) const;

  Dag dag() const;

 private:
  Schema schema_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<double>> cpts_;
};

/// Ancestral sampling in topological order; a pure function of its inputs.
CategoricalDataset forward_sample(const BayesNet& bn, std::size_t n, Seed seed);

struct RandomNetworkOptions {
  std::size_t nodes = 8;
  std::size_t max_parents = 2;
  std::size_t min_states = 2;
  std::size_t max_states = 3;
  /// Expected number of arcs per node, before the max_parents cap.
  double density = 1.0;
  /// Rows are normalised exponential draws raised to this power; larger values
  /// give more deterministic CPTs.
  double sharpness = 1.0;
  Seed seed = 0;
};

/// Random ground-truth network. Node names are X1..Xn and states s0..s{r-1}.
BayesNet random_bayes_net(const RandomNetworkOptions& options);

}  // namespace bntune
