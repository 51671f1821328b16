#include <algorithm>
#include <chrono>
#include <functional>

#include "bntune/error.hpp"
#include "bntune/learn.hpp"
#include "subsets.hpp"

namespace bntune {

SkeletonResult pc_stable_skeleton(CiTester& tester, std::size_t nodes, int max_sepset) {
  SkeletonResult result;
  result.skeleton = Pdag(nodes);
  Pdag& g = result.skeleton;
  for (std::size_t u = 0; u < nodes; ++u)
    for (std::size_t v = u + 1; v < nodes; ++v) g.set_undirected(u, v);

  const std::size_t before = tester.tests_performed();
  for (std::size_t level = 0;; ++level) {
    if (max_sepset >= 0 && level > static_cast<std::size_t>(max_sepset)) break;

    // Conditioning candidates come from the adjacencies at the start of the
    // level, so removals within the level cannot influence each other.
    std::vector<std::vector<std::size_t>> frozen(nodes);
    for (std::size_t u = 0; u < nodes; ++u) frozen[u] = g.adjacents(u);

    bool testable = false;
    for (std::size_t u = 0; u < nodes; ++u) {
      for (std::size_t v : frozen[u]) {
        if (v <= u) continue;
        for (auto [x, y] : {std::pair{u, v}, std::pair{v, u}}) {
          if (!g.adjacent(u, v)) break;
          std::vector<std::size_t> candidates;
          for (auto c : frozen[x])
            if (c != y) candidates.push_back(c);
          if (candidates.size() < level) continue;
          testable = true;
          for_each_subset(candidates, level, [&](const std::vector<std::size_t>& s) {
            if (!tester.independent(u, v, s)) return false;
            g.remove_edge(u, v);
            result.sepsets[{u, v}] = s;
            return true;
          });
        }
      }
    }
    if (!testable) break;
  }
  result.ci_tests = tester.tests_performed() - before;
  return result;
}

namespace {

// True when a directed path from -> ... -> to exists using directed arcs only.
bool directed_path(const Pdag& g, std::size_t from, std::size_t to) {
  std::vector<char> seen(g.size(), 0);
  std::vector<std::size_t> stack{from};
  seen[from] = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    if (u == to) return true;
    for (std::size_t w : g.adjacents(u))
      if (!seen[w] && g.has_directed(u, w)) seen[w] = 1, stack.push_back(w);
  }
  return false;
}

// A collider x -> z <- y is applied as a whole or not at all: it is skipped
// when either arm already points away from z or when it would close a
// directed cycle.
void orient_v_structures(Pdag& g, const SkeletonResult& skel) {
  const std::size_t n = g.size();
  for (std::size_t x = 0; x < n; ++x) {
    for (std::size_t z = 0; z < n; ++z) {
      if (z == x || !g.adjacent(x, z)) continue;
      for (std::size_t y = x + 1; y < n; ++y) {
        if (y == z || !g.adjacent(y, z) || g.adjacent(x, y)) continue;
        auto it = skel.sepsets.find({x, y});
        const bool separated_by_z =
            it != skel.sepsets.end() && std::find(it->second.begin(), it->second.end(), z) != it->second.end();
        if (separated_by_z) continue;
        if (g.has_directed(z, x) || g.has_directed(z, y)) continue;
        if ((g.has_undirected(x, z) && directed_path(g, z, x)) || (g.has_undirected(y, z) && directed_path(g, z, y)))
          continue;
        g.set_directed(x, z);
        g.set_directed(y, z);
      }
    }
  }
}

}  // namespace

LearnOutput pc_stable(const CategoricalDataset& data, CiTestKind test, double alpha, int max_sepset) {
  const auto start = std::chrono::steady_clock::now();
  CiTester tester(data, test, alpha);
  SkeletonResult skel = pc_stable_skeleton(tester, data.vars(), max_sepset);
  Pdag g = skel.skeleton;
  orient_v_structures(g, skel);
  apply_meek_rules(g);

  LearnOutput out;
  out.kind = GraphKind::Pdag;
  try {
    const Dag extension = pdag_to_dag(g, 0);
    if (dag_to_cpdag(extension) == g) out.kind = GraphKind::Cpdag;
  } catch (const InextensibleError&) {
  }
  out.graph = std::move(g);
  out.stats.ci_tests = tester.tests_performed();
  out.stats.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace bntune
