#include <omp.h>

#include <algorithm>
#include <chrono>
#include <limits>
#include <tuple>

#include "bntune/error.hpp"
#include "bntune/learn.hpp"

namespace bntune {

namespace {

enum class MoveKind : int { Add = 0, Delete = 1, Reverse = 2 };

struct Move {
  MoveKind kind = MoveKind::Add;
  std::size_t from = 0;
  std::size_t to = 0;
  double delta = -std::numeric_limits<double>::infinity();
  bool valid = false;
};

// Larger gain wins; equal gains go to the smaller (kind, from, to).
bool better(const Move& a, const Move& b) {
  if (!a.valid) return false;
  if (!b.valid) return true;
  if (a.delta != b.delta) return a.delta > b.delta;
  return std::tuple(static_cast<int>(a.kind), a.from, a.to) < std::tuple(static_cast<int>(b.kind), b.from, b.to);
}

struct SearchState {
  const Dag* graph;
  const std::vector<double>* current;
  const std::vector<char>* reach;    // reach[u*n+v]: directed path u -> v
  const std::vector<char>* allowed;  // allowed[p*n+c]: p may be a parent of c
  const LocalScorer* scorer;
};

std::vector<char> transitive_closure(const Dag& g) {
  const std::size_t n = g.size();
  std::vector<char> reach(n * n, 0);
  std::vector<std::size_t> stack;
  for (std::size_t s = 0; s < n; ++s) {
    stack.assign(1, s);
    reach[s * n + s] = 1;
    while (!stack.empty()) {
      auto u = stack.back();
      stack.pop_back();
      for (auto c : g.children(u))
        if (!reach[s * n + c]) {
          reach[s * n + c] = 1;
          stack.push_back(c);
        }
    }
  }
  return reach;
}

std::vector<std::size_t> with(const std::vector<std::size_t>& set, std::size_t x) {
  std::vector<std::size_t> out(set);
  out.insert(std::lower_bound(out.begin(), out.end(), x), x);
  return out;
}

std::vector<std::size_t> without(const std::vector<std::size_t>& set, std::size_t x) {
  std::vector<std::size_t> out(set);
  out.erase(std::find(out.begin(), out.end(), x));
  return out;
}

// Best move among those that change the parent set of `to`: add from->to,
// delete from->to, reverse from->to.
Move best_move_into(const SearchState& st, std::size_t to) {
  const Dag& g = *st.graph;
  const std::size_t n = g.size();
  const auto& cur = *st.current;
  const auto& reach = *st.reach;
  const auto& allowed = *st.allowed;
  Move best;
  for (std::size_t from = 0; from < n; ++from) {
    if (from == to) continue;
    Move m;
    m.from = from;
    m.to = to;
    if (g.has_arc(from, to)) {
      m.kind = MoveKind::Delete;
      m.delta = (*st.scorer)(to, without(g.parents(to), from)) - cur[to];
      m.valid = true;
      if (better(m, best)) best = m;

      if (allowed[to * n + from]) {
        // Reversal closes a cycle iff another path from -> ... -> to exists.
        bool cycle = false;
        for (auto c : g.children(from))
          if (c != to && reach[c * n + to]) {
            cycle = true;
            break;
          }
        if (!cycle) {
          Move r = m;
          r.kind = MoveKind::Reverse;
          r.delta = ((*st.scorer)(to, without(g.parents(to), from)) + (*st.scorer)(from, with(g.parents(from), to))) -
                    (cur[to] + cur[from]);
          if (better(r, best)) best = r;
        }
      }
    } else if (!g.has_arc(to, from) && allowed[from * n + to] && !reach[to * n + from]) {
      m.kind = MoveKind::Add;
      m.delta = (*st.scorer)(to, with(g.parents(to), from)) - cur[to];
      m.valid = true;
      if (better(m, best)) best = m;
    }
  }
  return best;
}

Move best_move_serial(const SearchState& st) {
  Move best;
  for (std::size_t to = 0; to < st.graph->size(); ++to) {
    Move m = best_move_into(st, to);
    if (better(m, best)) best = m;
  }
  return best;
}

Move best_move_parallel(const SearchState& st, int threads) {
  const auto n = static_cast<std::ptrdiff_t>(st.graph->size());
  std::vector<Move> per_node(st.graph->size());
#pragma omp parallel for schedule(dynamic) num_threads(threads)
  for (std::ptrdiff_t to = 0; to < n; ++to) per_node[static_cast<std::size_t>(to)] = best_move_into(st, static_cast<std::size_t>(to));
  Move best;
  for (const auto& m : per_node)
    if (better(m, best)) best = m;
  return best;
}

}  // namespace

LearnOutput hill_climb(const CategoricalDataset& data, const ScoreSpec& spec,
                       const std::optional<ParentRestriction>& restrict, Seed /*seed*/,
                       const HillClimbOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  const std::size_t n = data.vars();

  std::vector<char> allowed(n * n, 1);
  for (std::size_t i = 0; i < n; ++i) allowed[i * n + i] = 0;
  if (restrict) {
    if (restrict->size() != n) throw ArgumentError("parent restriction must list every node");
    std::fill(allowed.begin(), allowed.end(), 0);
    for (std::size_t child = 0; child < n; ++child)
      for (auto p : (*restrict)[child]) {
        if (p >= n || p == child) throw ArgumentError("invalid parent restriction entry");
        allowed[p * n + child] = 1;
      }
  }

  LocalScoreCache private_cache;
  LocalScoreCache* cache = options.cache ? options.cache : &private_cache;
  const LocalScorer scorer(data, spec, cache);

  Dag g(n);
  std::vector<double> current(n);
  for (std::size_t i = 0; i < n; ++i) current[i] = scorer(i, {});
  auto total = [&] {
    double t = 0.0;
    for (double s : current) t += s;
    return t;
  };

  LearnOutput out;
  out.stats.score_trace.push_back(total());

  const bool parallel = options.execution == Execution::Parallel && !in_parallel_region();
  const int threads = resolve_threads(options.threads);
  while (true) {
    const std::vector<char> reach = transitive_closure(g);
    const SearchState st{&g, &current, &reach, &allowed, &scorer};
    const Move best = parallel ? best_move_parallel(st, threads) : best_move_serial(st);
    if (!best.valid || !(best.delta > kMinImprovement)) break;

    switch (best.kind) {
      case MoveKind::Add: g.add_arc(best.from, best.to); break;
      case MoveKind::Delete: g.remove_arc(best.from, best.to); break;
      case MoveKind::Reverse: g.reverse_arc(best.from, best.to); break;
    }
    current[best.to] = scorer(best.to, g.parents(best.to));
    if (best.kind == MoveKind::Reverse) current[best.from] = scorer(best.from, g.parents(best.from));
    out.stats.score_trace.push_back(total());
  }

  out.kind = GraphKind::Dag;
  out.graph = std::move(g);
  out.stats.score_evaluations = scorer.evaluations();
  out.stats.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace bntune
