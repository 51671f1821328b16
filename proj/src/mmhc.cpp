#include <algorithm>
#include <chrono>

#include "bntune/learn.hpp"
#include "subsets.hpp"

namespace bntune {

namespace {

// Candidate parents and children of `target` before symmetrization.
std::vector<std::size_t> max_min_parents_children(CiTester& tester, std::size_t target, std::size_t nodes,
                                                  int max_sepset) {
  const double alpha = tester.alpha();
  const std::size_t cap = max_sepset < 0 ? nodes : static_cast<std::size_t>(max_sepset);

  // worst_p[x]: largest p-value of x against target over the conditioning
  // subsets tried so far, i.e. the weakest (minimum) association.
  std::vector<double> worst_p(nodes, 0.0);
  std::vector<char> open(nodes, 1);
  open[target] = 0;
  for (std::size_t x = 0; x < nodes; ++x) {
    if (!open[x]) continue;
    worst_p[x] = tester.test(target, x, {}).p_value;
    if (worst_p[x] > alpha) open[x] = 0;
  }

  std::vector<std::size_t> cpc;
  while (true) {
    std::size_t pick = nodes;
    for (std::size_t x = 0; x < nodes; ++x)
      if (open[x] && (pick == nodes || worst_p[x] < worst_p[pick])) pick = x;
    if (pick == nodes) break;
    open[pick] = 0;
    cpc.push_back(pick);
    std::sort(cpc.begin(), cpc.end());

    // Only subsets containing the newcomer are new for the remaining candidates.
    std::vector<std::size_t> others;
    for (auto c : cpc)
      if (c != pick) others.push_back(c);
    for (std::size_t x = 0; x < nodes; ++x) {
      if (!open[x]) continue;
      for (std::size_t size = 0; size < std::min(cap, cpc.size()) && open[x]; ++size) {
        for_each_subset(others, size, [&](const std::vector<std::size_t>& s) {
          std::vector<std::size_t> cond(s);
          cond.push_back(pick);
          worst_p[x] = std::max(worst_p[x], tester.test(target, x, cond).p_value);
          if (worst_p[x] > alpha) {
            open[x] = 0;
            return true;
          }
          return false;
        });
      }
    }
  }

  // Backward phase: drop members separated from the target by other members.
  for (std::size_t i = 0; i < cpc.size();) {
    const std::size_t x = cpc[i];
    std::vector<std::size_t> rest;
    for (auto c : cpc)
      if (c != x) rest.push_back(c);
    bool separated = false;
    for (std::size_t size = 0; size <= std::min(cap, rest.size()) && !separated; ++size)
      separated = for_each_subset(rest, size, [&](const std::vector<std::size_t>& s) { return tester.independent(target, x, s); });
    if (separated)
      cpc.erase(cpc.begin() + static_cast<std::ptrdiff_t>(i));
    else
      ++i;
  }
  return cpc;
}

}  // namespace

ParentRestriction mmpc(const CategoricalDataset& data, CiTestKind test, double alpha, int max_sepset,
                       std::size_t* ci_tests) {
  const std::size_t n = data.vars();
  CiTester tester(data, test, alpha);
  std::vector<std::vector<std::size_t>> raw(n);
  for (std::size_t t = 0; t < n; ++t) raw[t] = max_min_parents_children(tester, t, n, max_sepset);

  ParentRestriction pc(n);
  for (std::size_t t = 0; t < n; ++t)
    for (auto x : raw[t])
      if (std::binary_search(raw[x].begin(), raw[x].end(), t)) pc[t].push_back(x);
  if (ci_tests) *ci_tests = tester.tests_performed();
  return pc;
}

LearnOutput mmhc(const CategoricalDataset& data, CiTestKind test, double alpha, const ScoreSpec& spec, Seed seed,
                 int max_sepset, const HillClimbOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  std::size_t ci_tests = 0;
  const ParentRestriction restriction = mmpc(data, test, alpha, max_sepset, &ci_tests);
  LearnOutput out = hill_climb(data, spec, restriction, seed, options);
  out.stats.ci_tests = ci_tests;
  out.stats.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

}  // namespace bntune
