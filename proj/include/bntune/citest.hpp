#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <mutex>
#include <span>
#include <string_view>
#include <vector>

#include "bntune/contingency.hpp"
#include "bntune/dataset.hpp"

namespace bntune {

enum class CiTestKind { ChiSquare, MutualInformation, ShrinkageMutualInformation };

std::string_view to_string(CiTestKind kind);
/// Accepts "chi2", "mi", "mi-sh". Throws ArgumentError otherwise.
CiTestKind parse_ci_test(std::string_view name);

struct CiResult {
  double statistic = 0.0;
  std::size_t dof = 0;
  double p_value = 1.0;
  bool independent = true;
};

struct ShrinkageEstimate {
  double lambda_star = 1.0;
  double cell_count = 0.0;
};

/// Sum over strata of (non-empty rows - 1)(non-empty columns - 1), each term
/// clamped at zero.
std::size_t degrees_of_freedom(const ContingencyTable& table);

/// Pearson statistic sum (n_abc - m_abc)^2 / m_abc with m_abc = n_ac n_bc / n_c.
CiResult chi_square_test(const ContingencyTable& table, double alpha);

/// Plug-in conditional mutual information in nats.
double mutual_information(const ContingencyTable& table);

/// G^2 = 2 n MI(A, B | C) against the chi-square distribution.
CiResult mi_test(const ContingencyTable& table, double alpha);

/// James-Stein shrinkage intensity toward the uniform distribution over
/// `cell_count` cells. `p_hat` lists the non-zero probabilities; cells absent
/// from it are zero. Denominator 0 yields lambda = 1; result clamped to [0, 1].
ShrinkageEstimate shrinkage_lambda(std::span<const double> p_hat, std::uint64_t n, double cell_count);
/// Overload where p_hat covers every cell.
ShrinkageEstimate shrinkage_lambda(std::span<const double> p_hat, std::uint64_t n);

/// Conditional MI of the shrunk joint: lambda/|A||B||C| + (1-lambda) p_hat,
/// marginals obtained by summing the shrunk joint.
double shrinkage_mutual_information(const ContingencyTable& table, double lambda);

/// 2 n MI-sh against the chi-square distribution, lambda estimated from the
/// joint (A, B, C) cell frequencies.
CiResult mi_sh_test(const ContingencyTable& table, double alpha);

CiResult run_ci_test(CiTestKind kind, const ContingencyTable& table, double alpha);

/// Memoizing CI oracle over one dataset. Results are keyed by the unordered
/// pair and the sorted conditioning set, so test(a, b, S) == test(b, a, S).
/// Thread-safe.
class CiTester {
 public:
  CiTester(const CategoricalDataset& data, CiTestKind kind, double alpha);

  CiResult test(std::size_t a, std::size_t b, std::span<const std::size_t> cond);
  bool independent(std::size_t a, std::size_t b, std::span<const std::size_t> cond) {
    return test(a, b, cond).independent;
  }

  std::size_t tests_performed() const;
  const CategoricalDataset& data() const noexcept { return *data_; }
  double alpha() const noexcept { return alpha_; }

 private:
  const CategoricalDataset* data_;
  CiTestKind kind_;
  double alpha_;
  mutable std::mutex mutex_;
  std::map<std::vector<std::size_t>, CiResult> cache_;
  std::size_t performed_ = 0;
};

}  // namespace bntune
