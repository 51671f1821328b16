#include <gtest/gtest.h>

#include <algorithm>
#include <map>
#include <set>

#include "bntune/error.hpp"
#include "bntune/graph.hpp"
#include "support.hpp"

using namespace bntune;
using namespace bntune::testing;

namespace {

// A DAG is a consistent extension of p when it keeps p's skeleton and
// directed arcs, is acyclic, and has exactly p's v-structures.
void expect_consistent_extension(const Pdag& p, const Dag& d) {
  const Pdag as_pdag = Pdag::from_dag(d);
  EXPECT_TRUE(same_skeleton(p, as_pdag));
  for (auto [u, v] : p.directed_arcs()) EXPECT_TRUE(d.has_arc(u, v));
  EXPECT_EQ(v_structures(d), v_structures(p));
}

}  // namespace

TEST(Dag, AcyclicityExamples) {
  EXPECT_TRUE(is_acyclic(3, {}));
  const std::vector<Arc> cycle{{0, 1}, {1, 2}, {2, 0}};
  EXPECT_FALSE(is_acyclic(3, cycle));
  const std::vector<Arc> ok{{0, 1}, {0, 2}, {1, 2}};
  EXPECT_TRUE(is_acyclic(3, ok));
}

TEST(Dag, RejectsCyclesAndSelfLoops) {
  Dag g(3);
  g.add_arc(0, 1);
  g.add_arc(1, 2);
  EXPECT_THROW(g.add_arc(2, 0), ArgumentError);
  EXPECT_THROW(g.add_arc(1, 1), ArgumentError);
  const std::vector<Arc> cycle{{0, 1}, {1, 0}};
  EXPECT_THROW(Dag::from_arcs(2, cycle), ValidationError);
}

TEST(Dag, ReversalCycleCheck) {
  Dag g(3);
  g.add_arc(0, 1);
  g.add_arc(1, 2);
  g.add_arc(0, 2);
  EXPECT_TRUE(g.reversal_creates_cycle(0, 2));
  EXPECT_FALSE(g.reversal_creates_cycle(1, 2));
}

TEST(Dag, TopologicalOrderRespectsArcs) {
  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const Dag g = random_dag(8, 0.4, rng);
    const auto order = g.topological_order();
    std::vector<std::size_t> pos(8);
    for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = i;
    for (auto [u, v] : g.arcs()) EXPECT_LT(pos[u], pos[v]);
  }
}

TEST(Cpdag, Examples) {
  const std::vector<Arc> chain{{0, 1}, {1, 2}};
  const Pdag c = dag_to_cpdag(Dag::from_arcs(3, chain));
  EXPECT_TRUE(c.has_undirected(0, 1));
  EXPECT_TRUE(c.has_undirected(1, 2));
  EXPECT_TRUE(c.directed_arcs().empty());

  const std::vector<Arc> collider{{0, 2}, {1, 2}};
  const Pdag v = dag_to_cpdag(Dag::from_arcs(3, collider));
  EXPECT_TRUE(v.has_directed(0, 2));
  EXPECT_TRUE(v.has_directed(1, 2));

  const std::vector<Arc> single{{0, 1}};
  EXPECT_TRUE(dag_to_cpdag(Dag::from_arcs(2, single)).has_undirected(0, 1));
}

TEST(Cpdag, ThreeNodeClassesByEnumeration) {
  const auto dags = all_dags(3);
  ASSERT_EQ(dags.size(), 25u);
  // Oracle: Markov equivalence = same skeleton and same v-structures.
  std::map<std::pair<std::vector<std::pair<std::size_t, std::size_t>>, std::vector<VStructure>>, std::vector<std::size_t>>
      classes;
  for (std::size_t i = 0; i < dags.size(); ++i) {
    std::vector<std::pair<std::size_t, std::size_t>> skeleton;
    for (auto [u, v] : dags[i].arcs()) skeleton.emplace_back(std::min(u, v), std::max(u, v));
    std::sort(skeleton.begin(), skeleton.end());
    classes[{skeleton, v_structures(dags[i])}].push_back(i);
  }
  EXPECT_EQ(classes.size(), 11u);
  std::set<std::vector<std::pair<std::size_t, std::size_t>>> seen;
  for (const auto& [key, members] : classes) {
    const Pdag first = dag_to_cpdag(dags[members[0]]);
    for (auto m : members) EXPECT_EQ(dag_to_cpdag(dags[m]), first);
    auto sig = first.undirected_edges();
    for (auto a : first.directed_arcs()) sig.push_back({a.first + 100, a.second + 100});
    EXPECT_TRUE(seen.insert(sig).second) << "two classes share a CPDAG";
  }
}

TEST(Cpdag, FourNodeCountMatchesKnownTotals) {
  const auto dags = all_dags(4);
  EXPECT_EQ(dags.size(), 543u);
  std::set<std::vector<std::pair<std::size_t, std::size_t>>> classes;
  for (const auto& d : dags) {
    const Pdag c = dag_to_cpdag(d);
    auto sig = c.undirected_edges();
    for (auto a : c.directed_arcs()) sig.push_back({a.first + 100, a.second + 100});
    std::sort(sig.begin(), sig.end());
    classes.insert(sig);
  }
  EXPECT_EQ(classes.size(), 185u);
}

TEST(Extension, FullyDirectedIsIdentity) {
  const std::vector<Arc> arcs{{0, 1}, {1, 2}, {0, 2}};
  const Dag d = Dag::from_arcs(3, arcs);
  EXPECT_EQ(pdag_to_dag(Pdag::from_dag(d), 9), d);
  EXPECT_EQ(cpdag_to_dag(Pdag(4), 1), Dag(4));
}

TEST(Extension, AvoidsNewCollider) {
  Pdag p(3);
  p.set_directed(0, 1);
  p.set_undirected(1, 2);
  for (Seed s = 0; s < 20; ++s) {
    const Dag d = pdag_to_dag(p, s);
    EXPECT_TRUE(d.has_arc(1, 2));
  }
}

TEST(Extension, TriangleReachesEveryAcyclicOrientation) {
  Pdag p(3);
  p.set_undirected(0, 1);
  p.set_undirected(1, 2);
  p.set_undirected(0, 2);
  std::set<std::vector<Arc>> seen;
  for (Seed s = 0; s < 200; ++s) {
    const Dag d = pdag_to_dag(p, s);
    expect_consistent_extension(p, d);
    seen.insert(d.arcs());
  }
  // All six acyclic orientations of a triangle are valid extensions.
  EXPECT_EQ(seen.size(), 6u);
}

TEST(Extension, ChainClassNeverBecomesCollider) {
  const std::vector<Arc> chain{{0, 1}, {1, 2}};
  const Pdag c = dag_to_cpdag(Dag::from_arcs(3, chain));
  for (Seed s = 0; s < 50; ++s) {
    const Dag d = cpdag_to_dag(c, s);
    EXPECT_FALSE(d.has_arc(0, 1) && d.has_arc(2, 1));
    EXPECT_EQ(dag_to_cpdag(d), c);
  }
}

TEST(Extension, InextensiblePdagThrows) {
  // A 4-cycle of undirected edges has no extension without a new collider.
  Pdag p(4);
  p.set_undirected(0, 1);
  p.set_undirected(1, 2);
  p.set_undirected(2, 3);
  p.set_undirected(3, 0);
  EXPECT_THROW(pdag_to_dag(p, 0), InextensibleError);
  const Dag best = pdag_to_dag(p, 0, ExtensionPolicy::BestEffort);
  EXPECT_TRUE(same_skeleton(p, Pdag::from_dag(best)));
}

TEST(Extension, DeterministicPerSeed) {
  Rng rng(8);
  const Dag g = random_dag(8, 0.3, rng);
  const Pdag c = dag_to_cpdag(g);
  EXPECT_EQ(cpdag_to_dag(c, 5), cpdag_to_dag(c, 5));
}

TEST(Extension, RoundTripProperty) {
  Rng rng(2024);
  for (int t = 0; t < 200; ++t) {
    const std::size_t n = 2 + rng.uniform_index(7);
    const Dag g = random_dag(n, 0.2 + 0.5 * rng.uniform01(), rng);
    const Pdag c = dag_to_cpdag(g);
    for (Seed s = 0; s < 5; ++s) {
      const Dag d = cpdag_to_dag(c, derive_seed(t, {s}));
      expect_consistent_extension(c, d);
      EXPECT_EQ(dag_to_cpdag(d), c);
    }
  }
}

TEST(Meek, RuleOnePropagates) {
  Pdag p(3);
  p.set_directed(0, 1);
  p.set_undirected(1, 2);
  apply_meek_rules(p);
  EXPECT_TRUE(p.has_directed(1, 2));
}

TEST(Meek, RuleTwoAvoidsCycle) {
  Pdag p(3);
  p.set_directed(0, 1);
  p.set_directed(1, 2);
  p.set_undirected(0, 2);
  apply_meek_rules(p);
  EXPECT_TRUE(p.has_directed(0, 2));
}

TEST(Meek, RuleThree) {
  // a - b, a - c, a - d, c -> b <- d, c and d non-adjacent: orient a -> b.
  Pdag p(4);
  p.set_undirected(0, 1);
  p.set_undirected(0, 2);
  p.set_undirected(0, 3);
  p.set_directed(2, 1);
  p.set_directed(3, 1);
  apply_meek_rules(p);
  EXPECT_TRUE(p.has_directed(0, 1));
}
