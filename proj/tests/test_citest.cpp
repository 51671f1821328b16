#include <gtest/gtest.h>

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <vector>

#include "bntune/citest.hpp"
#include "bntune/contingency.hpp"
#include "bntune/special_functions.hpp"
#include "support.hpp"

using namespace bntune;
using namespace bntune::testing;

namespace {

const Json& frozen() {
  static const Json j = frozen_values();
  return j;
}

double fv(const char* key) { return frozen().at(key).get<double>(); }

}  // namespace

TEST(SpecialFunctions, LogGammaMatchesStd) {
  for (double x : {1e-6, 0.1, 0.5, 1.0, 1.5, 2.0, 3.7, 10.0, 123.456, 1e5, 1e7}) {
    const double expected = std::lgamma(x);
    EXPECT_NEAR(log_gamma(x), expected, 1e-12 * std::max(1.0, std::fabs(expected))) << x;
  }
}

TEST(SpecialFunctions, UpperGammaMatchesBoost) {
  for (double a : {0.5, 1.0, 2.5, 10.0, 60.0, 400.0})
    for (double x : {0.01, 0.5, 1.0, 3.0, 10.0, 50.0, 300.0, 500.0}) {
      const double expected = boost::math::gamma_q(a, x);
      const double got = gamma_q(a, x);
      if (expected < 1e-290) continue;
      EXPECT_NEAR(got, expected, 1e-10 * expected + 1e-300) << "a=" << a << " x=" << x;
    }
}

TEST(SpecialFunctions, ChiSquareTailEdgeCases) {
  EXPECT_EQ(chi_square_sf(5.0, 0), 1.0);
  EXPECT_EQ(chi_square_sf(0.0, 3), 1.0);
  EXPECT_NEAR(chi_square_sf(3.841458820694124, 1), 0.05, 1e-12);
}

TEST(ChiSquare, BalancedTableIsIndependent) {
  const auto t = contingency_from_counts({{15, 15}, {15, 15}});
  const auto r = chi_square_test(t, 0.05);
  EXPECT_EQ(r.statistic, 0.0);
  EXPECT_EQ(r.dof, 1u);
  EXPECT_EQ(r.p_value, 1.0);
  EXPECT_TRUE(r.independent);
}

TEST(ChiSquare, FrozenExample) {
  const auto t = contingency_from_counts({{10, 20}, {20, 10}});
  const auto r = chi_square_test(t, 0.05);
  EXPECT_NEAR(r.statistic, fv("chi2_statistic"), 1e-12);
  EXPECT_EQ(r.dof, 1u);
  EXPECT_NEAR(r.p_value, fv("chi2_p_value"), 1e-12);
  EXPECT_FALSE(r.independent);
}

TEST(ChiSquare, ProductStrataGiveZero) {
  // Each stratum is an exact outer product of its marginals.
  std::vector<std::vector<int>> rows;
  auto add = [&](int a, int b, int c, int k) {
    for (int i = 0; i < k; ++i) rows.push_back({a, b, c});
  };
  add(0, 0, 0, 4), add(0, 1, 0, 2), add(1, 0, 0, 6), add(1, 1, 0, 3);
  add(0, 0, 1, 1), add(0, 1, 1, 1), add(1, 0, 1, 5), add(1, 1, 1, 5);
  const auto d = from_rows({2, 2, 2}, rows);
  const std::vector<std::size_t> cond{2};
  const auto r = chi_square_test(contingency(d, 0, 1, cond), 0.05);
  EXPECT_NEAR(r.statistic, 0.0, 1e-12);
  EXPECT_TRUE(r.independent);
}

TEST(ChiSquare, RejectsBadAlpha) {
  const auto t = contingency_from_counts({{1, 2}, {3, 4}});
  EXPECT_THROW(chi_square_test(t, 0.0), std::exception);
  EXPECT_THROW(chi_square_test(t, 1.0), std::exception);
}

TEST(Dof, StructuralZerosReduceDegrees) {
  // The second stratum only has one nonzero row, so it contributes nothing.
  const auto d = from_rows({3, 2, 2}, {{0, 0, 0}, {1, 1, 0}, {2, 0, 0}, {2, 1, 0}, {0, 0, 1}, {0, 1, 1}});
  const std::vector<std::size_t> cond{2};
  const auto t = contingency(d, 0, 1, cond);
  EXPECT_EQ(degrees_of_freedom(t), 2u);
}

TEST(Dof, ZeroDofMeansIndependent) {
  const auto t = contingency_from_counts({{5, 7}, {0, 0}});
  for (auto kind : {CiTestKind::ChiSquare, CiTestKind::MutualInformation, CiTestKind::ShrinkageMutualInformation}) {
    const auto r = run_ci_test(kind, t, 0.05);
    EXPECT_EQ(r.dof, 0u);
    EXPECT_EQ(r.p_value, 1.0);
    EXPECT_TRUE(r.independent);
  }
}

TEST(MutualInformation, Examples) {
  EXPECT_NEAR(mutual_information(contingency_from_counts({{10, 20}, {5, 10}})), 0.0, 1e-15);
  EXPECT_NEAR(mutual_information(contingency_from_counts({{10, 20}, {20, 10}})), fv("mi"), 1e-12);
  EXPECT_NEAR(mutual_information(contingency_from_counts({{30, 0}, {0, 30}})), fv("mi_diagonal"), 1e-12);
}

TEST(MutualInformation, GTestExamples) {
  auto r = mi_test(contingency_from_counts({{10, 20}, {5, 10}}), 0.05);
  EXPECT_NEAR(r.statistic, 0.0, 1e-12);
  EXPECT_TRUE(r.independent);

  r = mi_test(contingency_from_counts({{10, 20}, {20, 10}}), 0.05);
  EXPECT_NEAR(r.statistic, fv("g2_statistic"), 1e-10);
  EXPECT_NEAR(r.p_value, fv("g2_p_value"), 1e-12);
  EXPECT_FALSE(r.independent);

  r = mi_test(contingency_from_counts({{30, 0}, {0, 30}}), 0.01);
  EXPECT_NEAR(r.statistic, fv("g2_diagonal"), 1e-10);
  EXPECT_FALSE(r.independent);
}

TEST(MutualInformation, GScalesWithSampleSize) {
  const auto small = mi_test(contingency_from_counts({{10, 20}, {20, 10}}), 0.05);
  const auto large = mi_test(contingency_from_counts({{30, 60}, {60, 30}}), 0.05);
  EXPECT_NEAR(large.statistic, 3.0 * small.statistic, 1e-9);
  EXPECT_NEAR(mutual_information(contingency_from_counts({{30, 60}, {60, 30}})),
              mutual_information(contingency_from_counts({{10, 20}, {20, 10}})), 1e-14);
}

TEST(Shrinkage, LambdaExamples) {
  const std::vector<double> uniform{0.25, 0.25, 0.25, 0.25};
  EXPECT_EQ(shrinkage_lambda(uniform, 100).lambda_star, 1.0);
  const std::vector<double> p{0.8, 0.2};
  EXPECT_NEAR(shrinkage_lambda(p, 11).lambda_star, fv("lambda_v2_n11"), 1e-15);
  EXPECT_NEAR(shrinkage_lambda(p, 10001).lambda_star, fv("lambda_v2_n10001"), 1e-15);
  EXPECT_EQ(shrinkage_lambda(p, 1).lambda_star, 1.0);
}

TEST(Shrinkage, LambdaIsClamped) {
  Rng rng(4);
  for (int t = 0; t < 200; ++t) {
    std::vector<double> p(2 + rng.uniform_index(6));
    double s = 0.0;
    for (auto& x : p) s += (x = rng.uniform01());
    for (auto& x : p) x /= s;
    const double l = shrinkage_lambda(p, 1 + rng.uniform_index(30)).lambda_star;
    EXPECT_GE(l, 0.0);
    EXPECT_LE(l, 1.0);
  }
}

TEST(Shrinkage, FrozenExampleSitsBetweenZeroAndPlugIn) {
  const auto t = contingency_from_counts({{10, 20}, {20, 10}});
  const auto r = mi_sh_test(t, 0.05);
  const double mi_sh = r.statistic / (2.0 * 60.0);
  EXPECT_NEAR(mi_sh, fv("mi_sh"), 1e-12);
  EXPECT_GT(mi_sh, 0.0);
  EXPECT_LT(mi_sh, fv("mi"));
}

TEST(Shrinkage, ZeroLambdaIsPlugIn) {
  const auto t = contingency_from_counts({{100, 300}, {250, 50}});
  EXPECT_NEAR(shrinkage_mutual_information(t, 0.0), mutual_information(t), 1e-12);
  EXPECT_NEAR(shrinkage_mutual_information(t, 1.0), 0.0, 1e-15);
}

TEST(Shrinkage, HugeSampleApproachesPlugIn) {
  const auto t = contingency_from_counts({{400000, 100000}, {100000, 400000}});
  const auto r = mi_sh_test(t, 0.05);
  EXPECT_NEAR(r.statistic / (2.0 * 1e6), mutual_information(t), 1e-5);
}

TEST(CiProperties, SymmetricInArguments) {
  const auto d = network_data(5, 500, 21, 3);
  for (auto kind : {CiTestKind::ChiSquare, CiTestKind::MutualInformation, CiTestKind::ShrinkageMutualInformation})
    for (std::size_t a = 0; a < 5; ++a)
      for (std::size_t b = a + 1; b < 5; ++b) {
        std::vector<std::size_t> cond;
        for (std::size_t c = 0; c < 5; ++c)
          if (c != a && c != b && cond.size() < 2) cond.push_back(c);
        const auto ab = run_ci_test(kind, contingency(d, a, b, cond), 0.05);
        const auto ba = run_ci_test(kind, contingency(d, b, a, cond), 0.05);
        EXPECT_NEAR(ab.statistic, ba.statistic, 1e-9);
        EXPECT_EQ(ab.dof, ba.dof);
        EXPECT_NEAR(ab.p_value, ba.p_value, 1e-12);
      }
}

TEST(CiProperties, EmptyConditioningSetIsUnconditional) {
  const auto d = network_data(3, 300, 5);
  const std::vector<std::size_t> none;
  const auto a = chi_square_test(contingency(d, 0, 1, none), 0.05);
  const auto b = chi_square_test(contingency(d, 0, 1), 0.05);
  EXPECT_EQ(a.statistic, b.statistic);
  EXPECT_EQ(a.p_value, b.p_value);
}

TEST(CiProperties, PValueMonotoneInStatistic) {
  for (std::size_t dof : {1u, 2u, 5u, 30u}) {
    double prev = 1.0;
    for (double x = 0.0; x < 100.0; x += 0.37) {
      const double p = chi_square_sf(x, static_cast<double>(dof));
      EXPECT_LE(p, prev + 1e-15);
      prev = p;
    }
  }
}

TEST(CiProperties, ShrunkMarginalsAreConsistent) {
  // With a shared lambda the shrunk joint marginalises to the shrunk marginal.
  const auto t = contingency_from_counts({{3, 0, 5}, {1, 7, 2}});
  const double lambda = 0.3;
  const double V = 6.0;
  const double n = static_cast<double>(t.total());
  for (State a = 0; a < 2; ++a) {
    double joint_sum = 0.0;
    for (State b = 0; b < 3; ++b) joint_sum += lambda / V + (1 - lambda) * static_cast<double>(t.count(a, b)) / n;
    double row = 0.0;
    for (State b = 0; b < 3; ++b) row += static_cast<double>(t.count(a, b));
    EXPECT_NEAR(joint_sum, lambda * 3.0 / V + (1 - lambda) * row / n, 1e-15);
  }
  EXPECT_GE(shrinkage_mutual_information(t, lambda), 0.0);
}

TEST(CiTester, CachesAndCounts) {
  const auto d = network_data(4, 200, 2);
  CiTester tester(d, CiTestKind::ChiSquare, 0.05);
  const std::vector<std::size_t> cond{2, 3};
  const std::vector<std::size_t> cond_rev{3, 2};
  const auto r1 = tester.test(0, 1, cond);
  const auto r2 = tester.test(1, 0, cond_rev);
  EXPECT_EQ(tester.tests_performed(), 1u);
  EXPECT_EQ(r1.statistic, r2.statistic);
  EXPECT_EQ(r1.independent, r1.p_value > 0.05);
}
