#include "bntune/citest.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "bntune/error.hpp"
#include "bntune/special_functions.hpp"

namespace bntune {

std::string_view to_string(CiTestKind kind) {
  switch (kind) {
    case CiTestKind::ChiSquare: return "chi2";
    case CiTestKind::MutualInformation: return "mi";
    case CiTestKind::ShrinkageMutualInformation: return "mi-sh";
  }
  return "?";
}

CiTestKind parse_ci_test(std::string_view name) {
  if (name == "chi2") return CiTestKind::ChiSquare;
  if (name == "mi") return CiTestKind::MutualInformation;
  if (name == "mi-sh") return CiTestKind::ShrinkageMutualInformation;
  throw ArgumentError("unknown CI test '" + std::string(name) + "' (expected chi2, mi or mi-sh)");
}

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ArgumentError("significance level must lie in (0, 1)");
}

CiResult decide(double statistic, std::size_t dof, double alpha) {
  CiResult r;
  r.statistic = std::max(0.0, statistic);
  r.dof = dof;
  r.p_value = dof == 0 ? 1.0 : chi_square_sf(r.statistic, static_cast<double>(dof));
  r.independent = r.p_value > alpha;
  return r;
}

}  // namespace

std::size_t degrees_of_freedom(const ContingencyTable& table) {
  std::size_t dof = 0;
  for (const auto& s : table.strata()) {
    const auto rows = std::ranges::count_if(table.a_totals(s), [](auto c) { return c > 0; });
    const auto cols = std::ranges::count_if(table.b_totals(s), [](auto c) { return c > 0; });
    if (rows > 1 && cols > 1) dof += static_cast<std::size_t>((rows - 1) * (cols - 1));
  }
  return dof;
}

CiResult chi_square_test(const ContingencyTable& table, double alpha) {
  check_alpha(alpha);
  const std::size_t rb = table.b_cardinality();
  std::vector<std::uint64_t> dense;
  double statistic = 0.0;
  for (const auto& s : table.strata()) {
    dense.assign(table.a_cardinality() * rb, 0);
    for (const auto& cell : table.cells(s)) dense[cell.a * rb + cell.b] = cell.count;
    const double nc = static_cast<double>(s.total);
    const auto na = table.a_totals(s);
    const auto nb = table.b_totals(s);
    for (std::size_t a = 0; a < table.a_cardinality(); ++a) {
      if (na[a] == 0) continue;
      for (std::size_t b = 0; b < rb; ++b) {
        if (nb[b] == 0) continue;
        const double expected = static_cast<double>(na[a]) * static_cast<double>(nb[b]) / nc;
        const double diff = static_cast<double>(dense[a * rb + b]) - expected;
        statistic += diff * diff / expected;
      }
    }
  }
  return decide(statistic, degrees_of_freedom(table), alpha);
}

double mutual_information(const ContingencyTable& table) {
  const double n = static_cast<double>(table.total());
  if (n == 0.0) return 0.0;
  double mi = 0.0;
  for (const auto& s : table.strata()) {
    const double nc = static_cast<double>(s.total);
    for (const auto& cell : table.cells(s)) {
      const double nabc = static_cast<double>(cell.count);
      const double nac = static_cast<double>(table.a_totals(s)[cell.a]);
      const double nbc = static_cast<double>(table.b_totals(s)[cell.b]);
      mi += nabc / n * std::log(nabc * nc / (nac * nbc));
    }
  }
  return std::max(0.0, mi);
}

CiResult mi_test(const ContingencyTable& table, double alpha) {
  check_alpha(alpha);
  const double g2 = 2.0 * static_cast<double>(table.total()) * mutual_information(table);
  return decide(g2, degrees_of_freedom(table), alpha);
}

ShrinkageEstimate shrinkage_lambda(std::span<const double> p_hat, std::uint64_t n, double cell_count) {
  ShrinkageEstimate est;
  est.cell_count = cell_count;
  if (!(cell_count >= static_cast<double>(p_hat.size())) || cell_count <= 0.0)
    throw ArgumentError("cell count must cover the listed probabilities");
  const double target = 1.0 / cell_count;
  double sum_sq = 0.0;
  double dist = 0.0;
  for (double p : p_hat) {
    sum_sq += p * p;
    dist += (target - p) * (target - p);
  }
  dist += (cell_count - static_cast<double>(p_hat.size())) * target * target;
  const double denom = (static_cast<double>(n) - 1.0) * dist;
  if (n <= 1 || !(denom > 0.0)) {
    est.lambda_star = 1.0;
    return est;
  }
  est.lambda_star = std::clamp((1.0 - sum_sq) / denom, 0.0, 1.0);
  return est;
}

ShrinkageEstimate shrinkage_lambda(std::span<const double> p_hat, std::uint64_t n) {
  return shrinkage_lambda(p_hat, n, static_cast<double>(p_hat.size()));
}

double shrinkage_mutual_information(const ContingencyTable& table, double lambda) {
  const double n = static_cast<double>(table.total());
  if (n == 0.0) return 0.0;
  const std::size_t ra = table.a_cardinality();
  const std::size_t rb = table.b_cardinality();
  const double cells = static_cast<double>(ra) * static_cast<double>(rb) * table.conditioning_configurations();
  const double base = lambda / cells;
  const double keep = 1.0 - lambda;

  // Strata with no observations have a uniform shrunk joint, which factorizes
  // and contributes nothing; only observed strata are visited.
  std::vector<std::uint64_t> dense;
  double mi = 0.0;
  for (const auto& s : table.strata()) {
    dense.assign(ra * rb, 0);
    for (const auto& cell : table.cells(s)) dense[cell.a * rb + cell.b] = cell.count;
    const double pc = static_cast<double>(ra * rb) * base + keep * static_cast<double>(s.total) / n;
    for (std::size_t a = 0; a < ra; ++a) {
      const double pac = static_cast<double>(rb) * base + keep * static_cast<double>(table.a_totals(s)[a]) / n;
      for (std::size_t b = 0; b < rb; ++b) {
        const double pabc = base + keep * static_cast<double>(dense[a * rb + b]) / n;
        if (pabc <= 0.0) continue;
        const double pbc = static_cast<double>(ra) * base + keep * static_cast<double>(table.b_totals(s)[b]) / n;
        mi += pabc * std::log(pabc * pc / (pac * pbc));
      }
    }
  }
  return std::max(0.0, mi);
}

CiResult mi_sh_test(const ContingencyTable& table, double alpha) {
  check_alpha(alpha);
  const double n = static_cast<double>(table.total());
  if (n == 0.0) return decide(0.0, 0, alpha);
  std::vector<double> p_hat;
  p_hat.reserve(table.cells().size());
  for (const auto& cell : table.cells()) p_hat.push_back(static_cast<double>(cell.count) / n);
  const double cells = static_cast<double>(table.a_cardinality()) * static_cast<double>(table.b_cardinality()) *
                       table.conditioning_configurations();
  const auto lambda = shrinkage_lambda(p_hat, table.total(), cells).lambda_star;
  const double statistic = 2.0 * n * shrinkage_mutual_information(table, lambda);
  return decide(statistic, degrees_of_freedom(table), alpha);
}

CiResult run_ci_test(CiTestKind kind, const ContingencyTable& table, double alpha) {
  switch (kind) {
    case CiTestKind::ChiSquare: return chi_square_test(table, alpha);
    case CiTestKind::MutualInformation: return mi_test(table, alpha);
    case CiTestKind::ShrinkageMutualInformation: return mi_sh_test(table, alpha);
  }
  throw ArgumentError("unknown CI test kind");
}

CiTester::CiTester(const CategoricalDataset& data, CiTestKind kind, double alpha)
    : data_(&data), kind_(kind), alpha_(alpha) {
  check_alpha(alpha);
}

CiResult CiTester::test(std::size_t a, std::size_t b, std::span<const std::size_t> cond) {
  std::vector<std::size_t> key;
  key.reserve(cond.size() + 2);
  key.push_back(std::min(a, b));
  key.push_back(std::max(a, b));
  key.insert(key.end(), cond.begin(), cond.end());
  std::sort(key.begin() + 2, key.end());
  {
    std::lock_guard lock(mutex_);
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
  }
  const std::span<const std::size_t> sorted_cond(key.data() + 2, key.size() - 2);
  const CiResult result = run_ci_test(kind_, contingency(*data_, key[0], key[1], sorted_cond), alpha_);
  std::lock_guard lock(mutex_);
  if (cache_.emplace(std::move(key), result).second) ++performed_;
  return result;
}

std::size_t CiTester::tests_performed() const {
  std::lock_guard lock(mutex_);
  return performed_;
}

}  // namespace bntune
