#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "bntune/rng.hpp"

namespace bntune {

/// (parent, child). Nodes are positional: node i is column i of the schema.
using Arc = std::pair<std::size_t, std::size_t>;

/// Directed acyclic graph. Mutators keep the graph acyclic and free of
/// duplicate or antiparallel arcs; they throw ArgumentError otherwise.
class Dag {
 public:
  explicit Dag(std::size_t nodes = 0);
  /// Throws ValidationError for self-loops, duplicate/antiparallel arcs or cycles.
  static Dag from_arcs(std::size_t nodes, std::span<const Arc> arcs);

  std::size_t size() const noexcept { return n_; }
  bool has_arc(std::size_t from, std::size_t to) const { return adj_[from * n_ + to] != 0; }
  bool adjacent(std::size_t a, std::size_t b) const { return has_arc(a, b) || has_arc(b, a); }
  const std::vector<std::size_t>& parents(std::size_t node) const { return parents_.at(node); }
  const std::vector<std::size_t>& children(std::size_t node) const { return children_.at(node); }
  std::size_t arc_count() const noexcept { return arc_count_; }
  /// Arcs in lexicographic (from, to) order.
  std::vector<Arc> arcs() const;

  /// True iff a directed path from -> ... -> to exists (from == to counts).
  bool reachable(std::size_t from, std::size_t to) const;
  /// True iff adding from -> to would close a directed cycle.
  bool creates_cycle(std::size_t from, std::size_t to) const { return from == to || reachable(to, from); }
  /// True iff reversing the existing arc from -> to would close a cycle.
  bool reversal_creates_cycle(std::size_t from, std::size_t to) const;

  void add_arc(std::size_t from, std::size_t to);
  void remove_arc(std::size_t from, std::size_t to);
  void reverse_arc(std::size_t from, std::size_t to);

  std::vector<std::size_t> topological_order() const;

  friend bool operator==(const Dag& a, const Dag& b) { return a.n_ == b.n_ && a.adj_ == b.adj_; }

 private:
  std::size_t n_ = 0;
  std::vector<std::uint8_t> adj_;
  std::vector<std::vector<std::size_t>> parents_;
  std::vector<std::vector<std::size_t>> children_;
  std::size_t arc_count_ = 0;
};

/// True iff the arc set over `nodes` vertices has a topological order.
bool is_acyclic(std::size_t nodes, std::span<const Arc> arcs);

/// Partially directed graph: every adjacent pair carries either one directed
/// arc or one undirected edge.
class Pdag {
 public:
  explicit Pdag(std::size_t nodes = 0);
  static Pdag from_dag(const Dag& dag);

  std::size_t size() const noexcept { return n_; }
  bool adjacent(std::size_t a, std::size_t b) const { return mark(a, b) != kNone; }
  bool has_directed(std::size_t from, std::size_t to) const { return mark(from, to) == kOut; }
  bool has_undirected(std::size_t a, std::size_t b) const { return mark(a, b) == kUndirected; }

  /// Adds or overwrites the edge between the pair.
  void set_directed(std::size_t from, std::size_t to);
  void set_undirected(std::size_t a, std::size_t b);
  void remove_edge(std::size_t a, std::size_t b);

  std::vector<Arc> directed_arcs() const;
  /// Undirected edges as (u, v) with u < v, lexicographic.
  std::vector<std::pair<std::size_t, std::size_t>> undirected_edges() const;
  std::vector<std::size_t> adjacents(std::size_t node) const;
  std::size_t edge_count() const;
  bool fully_directed() const;

  friend bool operator==(const Pdag& a, const Pdag& b) { return a.n_ == b.n_ && a.marks_ == b.marks_; }

 private:
  enum Mark : std::uint8_t { kNone = 0, kOut = 1, kIn = 2, kUndirected = 3 };
  Mark mark(std::size_t a, std::size_t b) const { return static_cast<Mark>(marks_[a * n_ + b]); }
  void check(std::size_t a, std::size_t b) const;

  std::size_t n_ = 0;
  std::vector<std::uint8_t> marks_;
};

/// Collider x -> z <- y with x, y non-adjacent; stored with x < y.
struct VStructure {
  std::size_t x;
  std::size_t z;
  std::size_t y;
  friend auto operator<=>(const VStructure&, const VStructure&) = default;
};

/// V-structures formed by directed arcs, sorted.
std::vector<VStructure> v_structures(const Pdag& graph);
std::vector<VStructure> v_structures(const Dag& dag);

bool same_skeleton(const Pdag& a, const Pdag& b);

/// Applies Meek's four orientation rules until no rule fires.
void apply_meek_rules(Pdag& graph);

/// Completed PDAG of the Markov equivalence class of `dag`.
Pdag dag_to_cpdag(const Dag& dag);

enum class ExtensionPolicy {
  /// Throw InextensibleError when no consistent extension exists.
  Strict,
  /// Fall back to orienting toward any sink (reversing directed arcs if
  /// needed) so that a DAG over the same skeleton is always returned.
  BestEffort,
};

/// Consistent extension by Dor-Tarsi elimination; ties between eligible sinks
/// are broken uniformly by `seed`.
Dag pdag_to_dag(const Pdag& graph, Seed seed, ExtensionPolicy policy = ExtensionPolicy::Strict);

/// Random member of the equivalence class represented by a CPDAG. Same
/// routine as pdag_to_dag; kept separate because callers branch on the
/// learner's output kind.
Dag cpdag_to_dag(const Pdag& cpdag, Seed seed, ExtensionPolicy policy = ExtensionPolicy::Strict);

}  // namespace bntune
