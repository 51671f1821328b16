#include "bntune/bayes_net.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bntune/error.hpp"

namespace bntune {

BayesNet::BayesNet(Schema schema, std::vector<std::vector<std::size_t>> parents, std::vector<std::vector<double>> cpts)
    : schema_(std::move(schema)), parents_(std::move(parents)), cpts_(std::move(cpts)) {
  const std::size_t n = schema_.size();
  if (parents_.size() != n || cpts_.size() != n) throw ValidationError("parents and CPTs must cover every variable");
  for (std::size_t i = 0; i < n; ++i) {
    const std::string& name = schema_.variable(i).name;
    std::vector<std::size_t> seen;
    for (auto p : parents_[i]) {
      if (p >= n) throw ValidationError("parent index out of range for '" + name + "'");
      if (p == i) throw ValidationError("'" + name + "' lists itself as a parent");
      if (std::find(seen.begin(), seen.end(), p) != seen.end())
        throw ValidationError("duplicate parent of '" + name + "'");
      seen.push_back(p);
    }
    const std::size_t r = schema_.cardinality(i);
    const std::size_t q = configurations(i);
    if (cpts_[i].size() != q * r)
      throw ValidationError("CPT of '" + name + "' has " + std::to_string(cpts_[i].size()) + " entries, expected " +
                            std::to_string(q * r));
    for (std::size_t j = 0; j < q; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < r; ++k) {
        const double p = cpts_[i][j * r + k];
        if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("CPT of '" + name + "' has an entry outside [0, 1]");
        sum += p;
      }
      if (std::fabs(sum - 1.0) > 1e-9)
        throw ValidationError("CPT row " + std::to_string(j) + " of '" + name + "' sums to " + std::to_string(sum));
    }
  }
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < n; ++i)
    for (auto p : parents_[i]) arcs.emplace_back(p, i);
  if (!is_acyclic(n, arcs)) throw ValidationError("parent structure is cyclic");
}

std::size_t BayesNet::configurations(std::size_t i) const {
  std::size_t q = 1;
  for (auto p : parents_.at(i)) q *= schema_.cardinality(p);
  return q;
}

Dag BayesNet::dag() const {
  std::vector<Arc> arcs;
  for (std::size_t i = 0; i < size(); ++i)
    for (auto p : parents_[i]) arcs.emplace_back(p, i);
  return Dag::from_arcs(size(), arcs);
}

CategoricalDataset forward_sample(const BayesNet& bn, std::size_t n, Seed seed) {
  if (n == 0) throw ArgumentError("sample size must be at least 1");
  const std::size_t V = bn.size();
  const std::vector<std::size_t> order = bn.dag().topological_order();

  // Cumulative rows; the last nonzero entry of each row is pinned to 1 so
  // rounding can never select an impossible state.
  std::vector<std::vector<double>> cumulative(V);
  for (std::size_t i = 0; i < V; ++i) {
    const std::size_t r = bn.schema().cardinality(i);
    cumulative[i] = bn.cpt(i);
    for (std::size_t j = 0; j < bn.configurations(i); ++j) {
      double* row = cumulative[i].data() + j * r;
      std::size_t last = 0;
      for (std::size_t k = 0; k < r; ++k)
        if (row[k] > 0.0) last = k;
      double acc = 0.0;
      for (std::size_t k = 0; k < r; ++k) {
        acc += row[k];
        row[k] = k >= last ? 1.0 : acc;
      }
    }
  }

  std::vector<std::vector<State>> columns(V, std::vector<State>(n));
  Rng rng(seed);
  for (std::size_t row = 0; row < n; ++row) {
    for (auto i : order) {
      std::size_t config = 0;
      for (auto p : bn.parents(i)) config = config * bn.schema().cardinality(p) + columns[p][row];
      const std::size_t r = bn.schema().cardinality(i);
      const double* cum = cumulative[i].data() + config * r;
      const double u = rng.uniform01();
      std::size_t k = 0;
      while (k + 1 < r && !(u < cum[k])) ++k;
      columns[i][row] = static_cast<State>(k);
    }
  }
  return CategoricalDataset(bn.schema(), std::move(columns));
}

BayesNet random_bayes_net(const RandomNetworkOptions& options) {
  const std::size_t n = options.nodes;
  if (n < 1) throw ArgumentError("network needs at least one node");
  if (options.min_states < 2 || options.max_states < options.min_states)
    throw ArgumentError("state counts must satisfy 2 <= min_states <= max_states");
  Rng rng(options.seed);

  std::vector<Variable> vars(n);
  for (std::size_t i = 0; i < n; ++i) {
    vars[i].name = "X" + std::to_string(i + 1);
    const std::size_t r = options.min_states + rng.uniform_index(options.max_states - options.min_states + 1);
    for (std::size_t k = 0; k < r; ++k) vars[i].states.push_back("s" + std::to_string(k));
  }

  // Arcs follow a random node order, so the structure is acyclic by construction.
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  rng.shuffle(std::span<std::size_t>(order));
  const double p_arc = n > 1 ? std::min(1.0, 2.0 * options.density / static_cast<double>(n - 1)) : 0.0;
  std::vector<std::vector<std::size_t>> parents(n);
  for (std::size_t pos = 1; pos < n; ++pos) {
    const std::size_t child = order[pos];
    std::vector<std::size_t> candidates(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pos));
    rng.shuffle(std::span<std::size_t>(candidates));
    for (auto c : candidates) {
      if (parents[child].size() >= options.max_parents) break;
      if (rng.uniform01() < p_arc) parents[child].push_back(c);
    }
    std::sort(parents[child].begin(), parents[child].end());
  }

  Schema schema(std::move(vars));
  std::vector<std::vector<double>> cpts(n);
  for (std::size_t i = 0; i < n; ++i) {
    std::size_t q = 1;
    for (auto p : parents[i]) q *= schema.cardinality(p);
    const std::size_t r = schema.cardinality(i);
    cpts[i].resize(q * r);
    for (std::size_t j = 0; j < q; ++j) {
      double sum = 0.0;
      for (std::size_t k = 0; k < r; ++k) {
        const double e = -std::log(1.0 - rng.uniform01());
        cpts[i][j * r + k] = std::pow(e, options.sharpness);
        sum += cpts[i][j * r + k];
      }
      for (std::size_t k = 0; k < r; ++k) cpts[i][j * r + k] /= sum;
    }
  }
  return BayesNet(std::move(schema), std::move(parents), std::move(cpts));
}

}  // namespace bntune
