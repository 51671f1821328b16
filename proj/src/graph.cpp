#include "bntune/graph.hpp"

#include <algorithm>
#include <string>

#include "bntune/error.hpp"

namespace bntune {

Dag::Dag(std::size_t nodes) : n_(nodes), adj_(nodes * nodes, 0), parents_(nodes), children_(nodes) {}

Dag Dag::from_arcs(std::size_t nodes, std::span<const Arc> arcs) {
  Dag dag(nodes);
  for (auto [from, to] : arcs) {
    if (from >= nodes || to >= nodes) throw ValidationError("arc endpoint out of range");
    if (from == to) throw ValidationError("self-loop on node " + std::to_string(from));
    if (dag.adjacent(from, to))
      throw ValidationError("duplicate or antiparallel arc " + std::to_string(from) + "->" + std::to_string(to));
    if (dag.creates_cycle(from, to))
      throw ValidationError("arc " + std::to_string(from) + "->" + std::to_string(to) + " closes a cycle");
    dag.add_arc(from, to);
  }
  return dag;
}

std::vector<Arc> Dag::arcs() const {
  std::vector<Arc> out;
  out.reserve(arc_count_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j : children_[i]) out.emplace_back(i, j);
  return out;
}

bool Dag::reachable(std::size_t from, std::size_t to) const {
  if (from == to) return true;
  std::vector<char> seen(n_, 0);
  std::vector<std::size_t> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto c : children_[u]) {
      if (c == to) return true;
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
  }
  return false;
}

bool Dag::reversal_creates_cycle(std::size_t from, std::size_t to) const {
  // After reversal to -> from; a cycle exists iff from reaches to without the arc.
  std::vector<char> seen(n_, 0);
  std::vector<std::size_t> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    auto u = stack.back();
    stack.pop_back();
    for (auto c : children_[u]) {
      if (u == from && c == to) continue;
      if (c == to) return true;
      if (!seen[c]) {
        seen[c] = 1;
        stack.push_back(c);
      }
    }
  }
  return false;
}

namespace {
void sorted_insert(std::vector<std::size_t>& v, std::size_t x) { v.insert(std::lower_bound(v.begin(), v.end(), x), x); }
void sorted_erase(std::vector<std::size_t>& v, std::size_t x) { v.erase(std::lower_bound(v.begin(), v.end(), x)); }
}  // namespace

void Dag::add_arc(std::size_t from, std::size_t to) {
  if (from >= n_ || to >= n_) throw ArgumentError("arc endpoint out of range");
  if (adjacent(from, to)) throw ArgumentError("nodes already adjacent");
  if (creates_cycle(from, to)) throw ArgumentError("arc would create a cycle");
  adj_[from * n_ + to] = 1;
  sorted_insert(children_[from], to);
  sorted_insert(parents_[to], from);
  ++arc_count_;
}

void Dag::remove_arc(std::size_t from, std::size_t to) {
  if (from >= n_ || to >= n_ || !has_arc(from, to)) throw ArgumentError("no such arc");
  adj_[from * n_ + to] = 0;
  sorted_erase(children_[from], to);
  sorted_erase(parents_[to], from);
  --arc_count_;
}

void Dag::reverse_arc(std::size_t from, std::size_t to) {
  if (from >= n_ || to >= n_ || !has_arc(from, to)) throw ArgumentError("no such arc");
  if (reversal_creates_cycle(from, to)) throw ArgumentError("reversal would create a cycle");
  remove_arc(from, to);
  add_arc(to, from);
}

std::vector<std::size_t> Dag::topological_order() const {
  std::vector<std::size_t> indegree(n_);
  for (std::size_t i = 0; i < n_; ++i) indegree[i] = parents_[i].size();
  std::vector<std::size_t> order;
  order.reserve(n_);
  std::vector<std::size_t> ready;
  for (std::size_t i = n_; i-- > 0;)
    if (indegree[i] == 0) ready.push_back(i);
  while (!ready.empty()) {
    auto u = ready.back();
    ready.pop_back();
    order.push_back(u);
    for (auto it = children_[u].rbegin(); it != children_[u].rend(); ++it)
      if (--indegree[*it] == 0) ready.push_back(*it);
  }
  return order;
}

bool is_acyclic(std::size_t nodes, std::span<const Arc> arcs) {
  std::vector<std::vector<std::size_t>> children(nodes);
  std::vector<std::size_t> indegree(nodes, 0);
  for (auto [from, to] : arcs) {
    if (from >= nodes || to >= nodes) throw ArgumentError("arc endpoint out of range");
    if (from == to) return false;
    children[from].push_back(to);
    ++indegree[to];
  }
  std::vector<std::size_t> ready;
  for (std::size_t i = 0; i < nodes; ++i)
    if (indegree[i] == 0) ready.push_back(i);
  std::size_t visited = 0;
  while (!ready.empty()) {
    auto u = ready.back();
    ready.pop_back();
    ++visited;
    for (auto c : children[u])
      if (--indegree[c] == 0) ready.push_back(c);
  }
  return visited == nodes;
}

// ---------------------------------------------------------------------------

Pdag::Pdag(std::size_t nodes) : n_(nodes), marks_(nodes * nodes, kNone) {}

Pdag Pdag::from_dag(const Dag& dag) {
  Pdag p(dag.size());
  for (auto [from, to] : dag.arcs()) p.set_directed(from, to);
  return p;
}

void Pdag::check(std::size_t a, std::size_t b) const {
  if (a >= n_ || b >= n_) throw ArgumentError("edge endpoint out of range");
  if (a == b) throw ArgumentError("self-loop");
}

void Pdag::set_directed(std::size_t from, std::size_t to) {
  check(from, to);
  marks_[from * n_ + to] = kOut;
  marks_[to * n_ + from] = kIn;
}

void Pdag::set_undirected(std::size_t a, std::size_t b) {
  check(a, b);
  marks_[a * n_ + b] = kUndirected;
  marks_[b * n_ + a] = kUndirected;
}

void Pdag::remove_edge(std::size_t a, std::size_t b) {
  check(a, b);
  marks_[a * n_ + b] = kNone;
  marks_[b * n_ + a] = kNone;
}

std::vector<Arc> Pdag::directed_arcs() const {
  std::vector<Arc> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = 0; j < n_; ++j)
      if (mark(i, j) == kOut) out.emplace_back(i, j);
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> Pdag::undirected_edges() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (mark(i, j) == kUndirected) out.emplace_back(i, j);
  return out;
}

std::vector<std::size_t> Pdag::adjacents(std::size_t node) const {
  std::vector<std::size_t> out;
  for (std::size_t j = 0; j < n_; ++j)
    if (mark(node, j) != kNone) out.push_back(j);
  return out;
}

std::size_t Pdag::edge_count() const {
  std::size_t count = 0;
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t j = i + 1; j < n_; ++j)
      if (mark(i, j) != kNone) ++count;
  return count;
}

bool Pdag::fully_directed() const {
  return std::none_of(marks_.begin(), marks_.end(), [](std::uint8_t m) { return m == kUndirected; });
}

std::vector<VStructure> v_structures(const Pdag& g) {
  std::vector<VStructure> out;
  const std::size_t n = g.size();
  for (std::size_t z = 0; z < n; ++z) {
    std::vector<std::size_t> parents;
    for (std::size_t x = 0; x < n; ++x)
      if (g.has_directed(x, z)) parents.push_back(x);
    for (std::size_t i = 0; i < parents.size(); ++i)
      for (std::size_t j = i + 1; j < parents.size(); ++j)
        if (!g.adjacent(parents[i], parents[j])) out.push_back({parents[i], z, parents[j]});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<VStructure> v_structures(const Dag& dag) { return v_structures(Pdag::from_dag(dag)); }

bool same_skeleton(const Pdag& a, const Pdag& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    for (std::size_t j = i + 1; j < a.size(); ++j)
      if (a.adjacent(i, j) != b.adjacent(i, j)) return false;
  return true;
}

namespace {

// Whether one of Meek's rules forces a -> b on the undirected edge a - b.
bool meek_orients(const Pdag& g, std::size_t a, std::size_t b) {
  const std::size_t n = g.size();
  for (std::size_t c = 0; c < n; ++c) {
    if (c == a || c == b) continue;
    // R1: c -> a - b, c and b non-adjacent.
    if (g.has_directed(c, a) && !g.adjacent(c, b)) return true;
    // R2: a -> c -> b.
    if (g.has_directed(a, c) && g.has_directed(c, b)) return true;
  }
  for (std::size_t c = 0; c < n; ++c) {
    if (c == a || c == b) continue;
    for (std::size_t d = c + 1; d < n; ++d) {
      if (d == a || d == b) continue;
      // R3: a - c -> b, a - d -> b, c and d non-adjacent.
      if (g.has_undirected(a, c) && g.has_undirected(a, d) && g.has_directed(c, b) && g.has_directed(d, b) &&
          !g.adjacent(c, d))
        return true;
    }
  }
  for (std::size_t d = 0; d < n; ++d) {
    if (d == a || d == b || !g.has_undirected(a, d) || !g.has_directed(d, b)) continue;
    for (std::size_t c = 0; c < n; ++c) {
      if (c == a || c == b || c == d) continue;
      // R4: c -> d -> b, a - d, a adjacent to c, c and b non-adjacent.
      if (g.has_directed(c, d) && g.adjacent(a, c) && !g.adjacent(c, b)) return true;
    }
  }
  return false;
}

}  // namespace

void apply_meek_rules(Pdag& g) {
  bool changed = true;
  while (changed) {
    changed = false;
    for (auto [u, v] : g.undirected_edges()) {
      if (!g.has_undirected(u, v)) continue;
      if (meek_orients(g, u, v)) {
        g.set_directed(u, v);
        changed = true;
      } else if (meek_orients(g, v, u)) {
        g.set_directed(v, u);
        changed = true;
      }
    }
  }
}

Pdag dag_to_cpdag(const Dag& dag) {
  const std::size_t n = dag.size();
  Pdag p(n);
  for (auto [from, to] : dag.arcs()) p.set_undirected(from, to);
  for (const auto& v : v_structures(dag)) {
    p.set_directed(v.x, v.z);
    p.set_directed(v.y, v.z);
  }
  apply_meek_rules(p);
  return p;
}

Dag pdag_to_dag(const Pdag& graph, Seed seed, ExtensionPolicy policy) {
  const std::size_t n = graph.size();
  Rng rng(seed);
  std::vector<char> alive(n, 1);
  std::vector<Arc> arcs;
  std::vector<std::size_t> candidates;
  std::vector<std::size_t> adj;

  auto is_sink = [&](std::size_t x) {
    for (std::size_t y = 0; y < n; ++y)
      if (alive[y] && graph.has_directed(x, y)) return false;
    return true;
  };

  for (std::size_t remaining = n; remaining > 0; --remaining) {
    candidates.clear();
    for (std::size_t x = 0; x < n; ++x) {
      if (!alive[x] || !is_sink(x)) continue;
      adj.clear();
      for (std::size_t y = 0; y < n; ++y)
        if (alive[y] && graph.adjacent(x, y)) adj.push_back(y);
      bool ok = true;
      for (std::size_t y : adj) {
        if (!graph.has_undirected(x, y)) continue;
        for (std::size_t z : adj)
          if (z != y && !graph.adjacent(y, z)) {
            ok = false;
            break;
          }
        if (!ok) break;
      }
      if (ok) candidates.push_back(x);
    }
    if (candidates.empty()) {
      if (policy == ExtensionPolicy::Strict) throw InextensibleError("PDAG admits no consistent DAG extension");
      for (std::size_t x = 0; x < n; ++x)
        if (alive[x] && is_sink(x)) candidates.push_back(x);
      if (candidates.empty())
        for (std::size_t x = 0; x < n; ++x)
          if (alive[x]) candidates.push_back(x);
    }
    const std::size_t x = candidates[rng.uniform_index(candidates.size())];
    for (std::size_t y = 0; y < n; ++y)
      if (alive[y] && y != x && graph.adjacent(x, y)) arcs.emplace_back(y, x);
    alive[x] = 0;
  }
  std::sort(arcs.begin(), arcs.end());
  return Dag::from_arcs(n, arcs);
}

Dag cpdag_to_dag(const Pdag& cpdag, Seed seed, ExtensionPolicy policy) { return pdag_to_dag(cpdag, seed, policy); }

}  // namespace bntune
