#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "bntune/bayes_net.hpp"
#include "bntune/error.hpp"
#include "bntune/score.hpp"
#include "support.hpp"

using namespace bntune;
using namespace bntune::testing;

namespace {

double fv(const char* key) {
  static const Json j = frozen_values();
  return j.at(key).get<double>();
}

CategoricalDataset balanced_binary(std::size_t per_state) {
  std::vector<std::vector<int>> rows;
  for (std::size_t i = 0; i < per_state; ++i) rows.push_back({0}), rows.push_back({1});
  return from_rows({2}, rows);
}

}  // namespace

TEST(Score, FrozenBinaryExample) {
  const auto d = balanced_binary(5);
  const Dag g(1);
  EXPECT_NEAR(log_likelihood(g, d), fv("ll_binary_5_5"), 1e-12);
  EXPECT_EQ(free_parameters(g, d.schema()), 1);
  EXPECT_NEAR(bic(g, d), fv("bic_binary_5_5"), 1e-12);
  EXPECT_NEAR(aic(g, d), fv("aic_binary_5_5"), 1e-12);
  // EBIC penalises by ln V, so the family term is taken in a two-variable model.
  const auto stats = family_stats(d, 0, {});
  EXPECT_NEAR(family_score(stats, ScoreSpec::ebic(1.0), 2), fv("ebic_binary_5_5_gamma1_v2"), 1e-12);
}

TEST(Score, FrozenBdeuExample) {
  EXPECT_NEAR(bdeu(Dag(1), balanced_binary(1), 1.0), fv("bdeu_binary_iss1"), 1e-12);
  EXPECT_NEAR(fv("bdeu_binary_iss1"), 3.0 * std::log(0.5), 1e-12);
}

TEST(Score, DeterministicChildHasZeroLikelihood) {
  const auto d = from_rows({2, 2}, {{0, 0}, {0, 0}, {1, 1}, {1, 1}});
  const std::vector<Arc> arc{{0, 1}};
  const auto g = Dag::from_arcs(2, arc);
  const std::size_t parent[] = {0};
  EXPECT_NEAR(family_log_likelihood(family_stats(d, 1, parent)), 0.0, 1e-15);
  EXPECT_NEAR(log_likelihood(g, d), 4.0 * std::log(0.5), 1e-12);
}

TEST(Score, FreeParameterExamples) {
  const auto bn = load_bayes_net(network_path("asia"));
  EXPECT_EQ(free_parameters(bn.dag(), bn.schema()), 18);
  const auto sports = load_bayes_net(network_path("sports"));
  EXPECT_EQ(free_parameters(sports.dag(), sports.schema()), 1049);
  const Schema s = make_schema({3, 2, 4});
  const std::vector<Arc> arcs{{0, 2}, {1, 2}};
  EXPECT_EQ(free_parameters(Dag::from_arcs(3, arcs), s), 2 + 1 + 3 * 6);
  EXPECT_EQ(free_parameters(Dag(3), s), 2 + 1 + 3);
}

TEST(Score, EmptyDataRejectedWherePenaltyNeedsLogN) {
  const auto d = from_rows({2}, {});
  EXPECT_THROW(bic(Dag(1), d), ArgumentError);
  EXPECT_THROW(aic(Dag(1), d), ArgumentError);
  EXPECT_EQ(bdeu(Dag(1), d, 1.0), 0.0);
}

TEST(Score, FactoryValidation) {
  EXPECT_THROW(ScoreSpec::ebic(-0.1), ArgumentError);
  EXPECT_THROW(ScoreSpec::ebic_normalised(1.5), ArgumentError);
  EXPECT_THROW(ScoreSpec::bdeu(0.0), ArgumentError);
  EXPECT_EQ(parse_score_kind("ebic-norm"), ScoreKind::EbicNormalised);
  EXPECT_THROW(parse_score_kind("mdl"), ArgumentError);
}

TEST(Score, EbicZeroIsBitIdenticalToBic) {
  const auto d = network_data(6, 400, 11);
  Rng rng(1);
  for (int t = 0; t < 30; ++t) {
    const Dag g = random_dag(6, 0.4, rng);
    EXPECT_EQ(ebic(g, d, 0.0), bic(g, d));
    EXPECT_EQ(ebic_normalised(g, d, 0.0), bic(g, d));
  }
}

TEST(Score, EbicDecreasesInGammaForNonEmptyModels) {
  const auto d = network_data(5, 300, 3);
  const std::vector<Arc> arcs{{0, 1}, {2, 3}};
  const Dag g = Dag::from_arcs(5, arcs);
  double prev = ebic(g, d, 0.0);
  for (double gamma = 0.25; gamma <= 3.0; gamma += 0.25) {
    const double s = ebic(g, d, gamma);
    EXPECT_LT(s, prev);
    prev = s;
  }
}

TEST(Score, GammaMapping) {
  EXPECT_NEAR(map_gamma_to_prime(3.0, 19.0), fv("gamma_prime_3_of_19"), 1e-15);
  EXPECT_EQ(map_gamma_to_prime(0.0, 0.0), 0.0);
  EXPECT_EQ(map_gamma_to_prime(19.0, 19.0), 1.0);
  EXPECT_THROW(map_gamma_to_prime(20.0, 19.0), ArgumentError);
  EXPECT_THROW(map_gamma_to_prime(-1.0, 19.0), ArgumentError);
  EXPECT_THROW(map_gamma_to_prime(1.0, 0.0), ArgumentError);
}

TEST(Score, NormalisedEbicSharesThePenaltyForm) {
  const auto d = network_data(5, 300, 9);
  Rng rng(5);
  const Dag g = random_dag(5, 0.5, rng);
  const double gp = map_gamma_to_prime(4.0, 8.0);
  EXPECT_EQ(ebic_normalised(g, d, gp), ebic(g, d, gp));
  EXPECT_EQ(ebic_normalised(g, d, 1.0), ebic(g, d, 1.0));
}

TEST(Score, DecomposableOverFamilies) {
  const auto d = network_data(6, 500, 17);
  Rng rng(77);
  for (const auto& spec : {ScoreSpec::log_likelihood(), ScoreSpec::bic(), ScoreSpec::aic(), ScoreSpec::ebic(1.5),
                           ScoreSpec::ebic_normalised(0.3), ScoreSpec::bdeu(4.0)}) {
    for (int t = 0; t < 10; ++t) {
      const Dag g = random_dag(6, 0.4, rng);
      double sum = 0.0;
      for (std::size_t v = 0; v < 6; ++v) sum += local_score(v, g.parents(v), d, spec);
      EXPECT_NEAR(sum, score(g, d, spec), 1e-9 * std::fabs(sum)) << spec.label();
    }
  }
}

TEST(Score, ScoreEquivalentAcrossMarkovClasses) {
  const auto d = network_data(3, 600, 23);
  const auto dags = all_dags(3);
  for (const auto& spec : {ScoreSpec::log_likelihood(), ScoreSpec::bic(), ScoreSpec::aic(), ScoreSpec::ebic(2.0),
                           ScoreSpec::bdeu(1.0), ScoreSpec::bdeu(10.0)}) {
    std::map<std::vector<std::pair<std::size_t, std::size_t>>, double> by_class;
    for (const auto& g : dags) {
      const Pdag c = dag_to_cpdag(g);
      auto sig = c.undirected_edges();
      for (auto a : c.directed_arcs()) sig.push_back({a.first + 100, a.second + 100});
      std::sort(sig.begin(), sig.end());
      const double s = score(g, d, spec);
      auto [it, inserted] = by_class.emplace(sig, s);
      if (!inserted) EXPECT_NEAR(it->second, s, 1e-8 * std::fabs(s)) << spec.label();
    }
    EXPECT_EQ(by_class.size(), 11u);
  }
}

TEST(Score, BdeuMatchesClosedFormWithStdLgamma) {
  const auto d = network_data(4, 250, 31);
  const std::vector<Arc> arcs{{0, 2}, {1, 2}, {2, 3}};
  const Dag g = Dag::from_arcs(4, arcs);
  const double iss = 3.0;
  double expected = 0.0;
  for (std::size_t v = 0; v < 4; ++v) {
    const auto st = family_stats(d, v, g.parents(v));
    const double aq = iss / st.q;
    const double ar = iss / (st.q * static_cast<double>(st.r));
    for (std::size_t j = 0; j < st.observed_configurations(); ++j) {
      expected += std::lgamma(aq) - std::lgamma(aq + static_cast<double>(st.row_totals[j]));
      for (std::size_t k = 0; k < st.r; ++k)
        expected += std::lgamma(ar + static_cast<double>(st.counts[j * st.r + k])) - std::lgamma(ar);
    }
  }
  EXPECT_NEAR(bdeu(g, d, iss), expected, 1e-9 * std::fabs(expected));
}

TEST(Score, CachedLocalScoresAreIdentical) {
  const auto d = network_data(5, 300, 41);
  LocalScoreCache cache;
  const std::size_t parents[] = {3, 1};
  const std::size_t sorted[] = {1, 3};
  const auto spec = ScoreSpec::bdeu(2.0);
  const double direct = local_score(0, parents, d, spec);
  const double first = local_score(0, parents, d, spec, &cache);
  const double second = local_score(0, sorted, d, spec, &cache);
  EXPECT_EQ(direct, first);
  EXPECT_EQ(first, second);
  EXPECT_EQ(cache.size(), 1u);
  local_score(0, parents, d, ScoreSpec::bdeu(3.0), &cache);
  EXPECT_EQ(cache.size(), 2u);
}

TEST(Score, TrueStructureBeatsEmptyOnLargeSample) {
  const auto bn = load_bayes_net(network_path("asia"));
  const auto d = forward_sample(bn, 5000, 3);
  for (const auto& spec : {ScoreSpec::bic(), ScoreSpec::ebic(1.0), ScoreSpec::bdeu(1.0)})
    EXPECT_GT(score(bn.dag(), d, spec), score(Dag(bn.size()), d, spec)) << spec.label();
}
