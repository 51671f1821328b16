#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <set>

#include "bntune/error.hpp"
#include "bntune/json_io.hpp"
#include "bntune/tune.hpp"
#include "support.hpp"

using namespace bntune;
using namespace bntune::testing;

namespace {

ConfigGrid hc_grid(std::vector<double> gammas) {
  ConfigGrid g;
  g.base = ConfigGrid::default_config(Algorithm::HillClimbing, TuningScore::EbicNormalised);
  g.gammas = std::move(gammas);
  return g;
}

TuneOptions small_options(std::size_t folds = 4, Seed seed = 3) {
  TuneOptions o;
  o.folds = folds;
  o.seed = seed;
  o.execution = Execution::Serial;
  return o;
}

}  // namespace

TEST(ConfigGrid, StandardSizes) {
  EXPECT_EQ(ConfigGrid::standard(Algorithm::PcStable, TuningScore::EbicNormalised).expand().size(), 3u);
  EXPECT_EQ(ConfigGrid::standard(Algorithm::PcStable, TuningScore::Bdeu).expand().size(), 3u);
  EXPECT_EQ(ConfigGrid::standard(Algorithm::HillClimbing, TuningScore::EbicNormalised).expand().size(), 20u);
  EXPECT_EQ(ConfigGrid::standard(Algorithm::HillClimbing, TuningScore::Bdeu).expand().size(), 20u);
  EXPECT_EQ(ConfigGrid::standard(Algorithm::Mmhc, TuningScore::EbicNormalised).expand().size(), 20u);
  EXPECT_EQ(ConfigGrid::standard(Algorithm::Mmhc, TuningScore::Bdeu).expand().size(), 20u);
  EXPECT_EQ(ConfigGrid::standard(Algorithm::HillClimbing, TuningScore::EbicNormalised).gamma_max(), 19.0);
}

TEST(ConfigGrid, ExpansionOrderAndValidation) {
  ConfigGrid g;
  g.base = ConfigGrid::default_config(Algorithm::Mmhc, TuningScore::EbicNormalised);
  g.alphas = {0.01, 0.05};
  g.gammas = {0.0, 1.0, 2.0};
  const auto cs = g.expand();
  ASSERT_EQ(cs.size(), 6u);
  EXPECT_EQ(*cs[0].alpha, 0.01);
  EXPECT_EQ(cs[2].score->gamma, 2.0);
  EXPECT_EQ(*cs[3].alpha, 0.05);
  EXPECT_EQ(cs[3].score->gamma, 0.0);

  g.isses = {1.0};
  EXPECT_THROW(g.expand(), ArgumentError);
  ConfigGrid pc;
  pc.base = ConfigGrid::default_config(Algorithm::PcStable, TuningScore::Bdeu);
  pc.gammas = {1.0};
  EXPECT_THROW(pc.expand(), ArgumentError);
  pc.gammas.clear();
  pc.alphas = {0.0};
  EXPECT_THROW(pc.expand(), ArgumentError);
}

TEST(Otsl, SingleConfigIsChosen) {
  const auto d = network_data(5, 400, 1);
  const auto report = otsl(d, hc_grid({}), small_options());
  EXPECT_EQ(report.chosen_index, 0u);
  EXPECT_EQ(report.per_config.size(), 1u);
  EXPECT_EQ(report.per_config[0].folds.size(), 4u);
  EXPECT_EQ(report.sizes.train, 300u);
  EXPECT_EQ(report.sizes.test, 100u);
}

TEST(Otsl, ChoiceIsArgmaxOfRecomputedFoldScores) {
  const auto d = network_data(6, 600, 2);
  ConfigGrid grid = hc_grid({0.0, 1.0, 3.0, 6.0});
  TuneOptions o = small_options(5, 11);
  const auto report = otsl(d, grid, o);
  SplitOptions so;
  so.folds = 5;
  so.seed = 11;
  const auto splits = resample_split(d, so);
  const auto configs = grid.expand();
  std::size_t best = 0;
  double best_mean = -INFINITY;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    double sum = 0.0;
    for (std::size_t k = 0; k < 5; ++k) {
      Config cfg = configs[c];
      cfg.seed = derive_seed(11, {c, k});
      const Dag g = learn(splits[k].train, cfg).to_dag(extension_seed(11, k));
      const double s = score_for_tuning_ebic(g, splits[k].test, cfg, 6.0);
      EXPECT_EQ(report.per_config[c].folds[k].score, s);
      sum += s;
    }
    const double mean = sum / 5.0;
    EXPECT_NEAR(report.per_config[c].mean_score, mean, 1e-12 * std::fabs(mean));
    if (mean > best_mean) best_mean = mean, best = c;
  }
  EXPECT_EQ(report.chosen_index, best);
  EXPECT_EQ(report.chosen, configs[best]);
}

TEST(Otsl, SerialAndParallelReportsIdentical) {
  const auto d = network_data(6, 500, 3);
  ConfigGrid grid;
  grid.base = ConfigGrid::default_config(Algorithm::Mmhc, TuningScore::Bdeu);
  grid.alphas = {0.01, 0.05};
  grid.isses = {1.0, 5.0, 10.0};
  TuneOptions serial = small_options(4, 5);
  serial.tuning_score = TuningScore::Bdeu;
  TuneOptions parallel = serial;
  parallel.execution = Execution::Parallel;
  parallel.threads = 4;
  const auto a = report_to_json(otsl(d, grid, serial), false);
  const auto b = report_to_json(otsl(d, grid, parallel), false);
  EXPECT_EQ(a.dump(), b.dump());
}

TEST(Otsl, SharedMmpcMatchesPlainLearner) {
  const auto d = network_data(6, 500, 13);
  ConfigGrid grid;
  grid.base = ConfigGrid::default_config(Algorithm::Mmhc, TuningScore::EbicNormalised);
  grid.alphas = {0.01, 0.1};
  grid.gammas = {0.0, 2.0, 4.0};
  TuneOptions cached = small_options(3, 21);
  TuneOptions plain = cached;
  plain.learner = [](const CategoricalDataset& data, const Config& c) { return learn(data, c); };
  EXPECT_EQ(report_to_json(otsl(d, grid, cached), false).dump(), report_to_json(otsl(d, grid, plain), false).dump());
}

TEST(Otsl, LearnerNeverSeesTestRows) {
  // The learner must only ever receive the bootstrap training folds.
  const auto d = network_data(4, 200, 4);
  SplitOptions so;
  so.folds = 4;
  so.seed = 9;
  const auto splits = resample_split(d, so);
  std::atomic<int> calls{0};
  TuneOptions o = small_options(4, 9);
  o.learner = [&](const CategoricalDataset& train, const Config& c) {
    ++calls;
    bool matches = false;
    for (const auto& s : splits) matches = matches || (train == s.train);
    EXPECT_TRUE(matches);
    for (const auto& s : splits) EXPECT_FALSE(train == s.test);
    return learn(train, c);
  };
  otsl(d, hc_grid({0.0, 2.0}), o);
  EXPECT_EQ(calls.load(), 8);
}

TEST(Otsl, RejectsBadArguments) {
  const auto d = network_data(4, 100, 5);
  EXPECT_THROW(otsl(d, hc_grid({}), small_options(1)), ArgumentError);
  EXPECT_THROW(otsl(d, hc_grid({}), small_options(101)), ArgumentError);
}

TEST(Otsl, FailingConfigIsExcludedWithWarning) {
  const auto d = network_data(4, 200, 6);
  TuneOptions o = small_options(3, 1);
  o.learner = [](const CategoricalDataset& train, const Config& c) {
    if (c.score->gamma == 1.0) throw Error("boom");
    return learn(train, c);
  };
  const auto report = otsl(d, hc_grid({0.0, 1.0, 2.0}), o);
  EXPECT_TRUE(report.per_config[1].failed);
  EXPECT_TRUE(std::isnan(report.per_config[1].mean_score));
  EXPECT_NE(report.chosen_index, 1u);
  ASSERT_FALSE(report.warnings.empty());

  o.learner = [](const CategoricalDataset&, const Config&) -> LearnOutput { throw Error("always"); };
  EXPECT_THROW(otsl(d, hc_grid({0.0, 1.0}), o), Error);
}

TEST(Otsl, TiesGoToFirstConfig) {
  // Every config returns the same empty graph, so all means tie.
  const auto d = network_data(4, 200, 7);
  TuneOptions o = small_options(3, 2);
  o.tuning_score = TuningScore::Bdeu;
  o.learner = [](const CategoricalDataset& train, const Config&) {
    LearnOutput out;
    out.graph = Dag(train.vars());
    return out;
  };
  ConfigGrid grid;
  grid.base = ConfigGrid::default_config(Algorithm::HillClimbing, TuningScore::Bdeu);
  // The BDeu tuning score uses each config's own iss, so all share one value.
  grid.isses = {2.0, 2.0, 2.0};
  EXPECT_EQ(otsl(d, grid, o).chosen_index, 0u);
}

TEST(Otsl, DeterministicForSeed) {
  const auto d = network_data(5, 300, 8);
  const auto a = report_to_json(otsl(d, hc_grid({0.0, 4.0}), small_options(3, 77)), false);
  const auto b = report_to_json(otsl(d, hc_grid({0.0, 4.0}), small_options(3, 77)), false);
  EXPECT_EQ(a, b);
}

TEST(TuningScoreFunctions, EbicUsesMappedGamma) {
  const auto d = network_data(5, 300, 9);
  Config c = ConfigGrid::default_config(Algorithm::HillClimbing, TuningScore::EbicNormalised);
  c.score = ScoreSpec::ebic(3.0);
  Rng rng(1);
  const Dag g = random_dag(5, 0.4, rng);
  EXPECT_EQ(score_for_tuning_ebic(g, d, c, 19.0), ebic_normalised(g, d, 3.0 / 19.0));
  Config pc = ConfigGrid::default_config(Algorithm::PcStable, TuningScore::EbicNormalised);
  EXPECT_EQ(score_for_tuning_ebic(g, d, pc, 19.0), bic(g, d));
  EXPECT_EQ(score_for_tuning_bdeu(g, d, pc), bdeu(g, d, 1.0));
}

TEST(Insample, PicksBestScoreAndTiesFirst) {
  const auto d = network_data(6, 500, 10);
  const auto grid = hc_grid({0.0, 0.5, 2.0, 8.0});
  const auto r = insample_select(d, grid, SelectionCriterion::Bic, 4, Execution::Serial);
  ASSERT_EQ(r.scores.size(), 4u);
  std::size_t best = 0;
  for (std::size_t i = 1; i < 4; ++i)
    if (r.scores[i] > r.scores[best]) best = i;
  EXPECT_EQ(r.index, best);
  const auto p = insample_select(d, grid, SelectionCriterion::Bic, 4, Execution::Parallel, 3);
  EXPECT_EQ(p.scores, r.scores);

  ConfigGrid same = hc_grid({1.0, 1.0, 1.0});
  EXPECT_EQ(insample_select(d, same, SelectionCriterion::Aic, 4, Execution::Serial).index, 0u);
}

TEST(RandomConfig, DeterministicAndCoversGrid) {
  const auto grid = hc_grid({0.0, 1.0, 2.0, 3.0});
  EXPECT_EQ(random_config(grid, 5), random_config(grid, 5));
  std::set<double> seen;
  for (Seed s = 0; s < 200; ++s) seen.insert(random_config(grid, s).score->gamma);
  EXPECT_EQ(seen.size(), 4u);
}
