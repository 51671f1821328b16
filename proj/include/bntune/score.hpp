#pragma once

#include <atomic>
#include <cstddef>
#include <cstdint>
#include <shared_mutex>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "bntune/dataset.hpp"
#include "bntune/graph.hpp"

namespace bntune {

enum class ScoreKind { LogLikelihood, Bic, Aic, Ebic, EbicNormalised, Bdeu };

std::string_view to_string(ScoreKind kind);
ScoreKind parse_score_kind(std::string_view name);

/// A score function together with its hyperparameter. Only the field the kind
/// uses is meaningful: `gamma` for Ebic, `gamma_prime` for EbicNormalised,
/// `iss` for Bdeu. Construct through the factories, which validate ranges.
struct ScoreSpec {
  ScoreKind kind = ScoreKind::Bic;
  double gamma = 0.0;
  double gamma_prime = 0.0;
  double iss = 1.0;

  static ScoreSpec log_likelihood() { return {ScoreKind::LogLikelihood}; }
  static ScoreSpec bic() { return {ScoreKind::Bic}; }
  static ScoreSpec aic() { return {ScoreKind::Aic}; }
  static ScoreSpec ebic(double gamma);
  static ScoreSpec ebic_normalised(double gamma_prime);
  static ScoreSpec bdeu(double iss);
  /// Factory by kind; `parameter` is ignored for kinds without one.
  static ScoreSpec make(ScoreKind kind, double parameter);

  bool has_gamma() const noexcept { return kind == ScoreKind::Ebic; }
  bool has_iss() const noexcept { return kind == ScoreKind::Bdeu; }
  /// The single hyperparameter value, 0 for kinds without one.
  double parameter() const noexcept;
  std::string label() const;

  friend bool operator==(const ScoreSpec& a, const ScoreSpec& b) {
    return a.kind == b.kind && a.parameter() == b.parameter();
  }
};

/// Sufficient statistics N_ijk of one family. Only observed parent
/// configurations are stored; `counts` is row-major, one row of length r per
/// observed configuration.
struct FamilyStats {
  std::size_t child = 0;
  std::vector<std::size_t> parents;
  double q = 1.0;  // product of parent cardinalities
  std::size_t r = 0;
  std::vector<std::uint64_t> counts;
  std::vector<std::uint64_t> row_totals;
  std::uint64_t n = 0;

  std::size_t observed_configurations() const noexcept { return row_totals.size(); }
};

FamilyStats family_stats(const CategoricalDataset& data, std::size_t child, std::span<const std::size_t> parents);

/// Per-family terms.
double family_log_likelihood(const FamilyStats& stats);
double family_free_parameters(const FamilyStats& stats);
double family_bdeu(const FamilyStats& stats, double iss);
double family_score(const FamilyStats& stats, const ScoreSpec& spec, std::size_t variable_count);

/// Whole-graph scores. Natural logarithms throughout.
double log_likelihood(const Dag& g, const CategoricalDataset& data);
/// Sum over nodes of (r_i - 1) q_i.
std::int64_t free_parameters(const Dag& g, const Schema& schema);
/// LL - (ln n / 2) F. Throws ArgumentError when n == 0.
double bic(const Dag& g, const CategoricalDataset& data);
/// LL - F. Throws ArgumentError when n == 0.
double aic(const Dag& g, const CategoricalDataset& data);
/// LL - (ln n / 2) F - gamma ln(V) F, gamma >= 0.
double ebic(const Dag& g, const CategoricalDataset& data, double gamma);
/// As ebic with gamma' in [0, 1].
double ebic_normalised(const Dag& g, const CategoricalDataset& data, double gamma_prime);
/// Log BDeu marginal likelihood, iss > 0. Zero for an empty dataset.
double bdeu(const Dag& g, const CategoricalDataset& data, double iss);
double score(const Dag& g, const CategoricalDataset& data, const ScoreSpec& spec);

/// gamma / gamma_max. Throws ArgumentError unless 0 <= gamma <= gamma_max;
/// gamma_max == 0 maps gamma == 0 to 0.
double map_gamma_to_prime(double gamma, double gamma_max);

/// Memo of local scores keyed by (child, sorted parent set, score spec).
/// Concurrent lookups and inserts are safe; racing inserts store identical
/// values.
class LocalScoreCache {
 public:
  bool lookup(std::size_t child, std::span<const std::size_t> parents, const ScoreSpec& spec, double& value) const;
  void insert(std::size_t child, std::span<const std::size_t> parents, const ScoreSpec& spec, double value);
  std::size_t size() const;
  void clear();

 private:
  struct Key {
    std::size_t child;
    std::vector<std::size_t> parents;
    ScoreKind kind;
    double parameter;
    bool operator==(const Key&) const = default;
  };
  struct KeyHash {
    std::size_t operator()(const Key& k) const noexcept;
  };
  static Key make_key(std::size_t child, std::span<const std::size_t> parents, const ScoreSpec& spec);

  mutable std::shared_mutex mutex_;
  std::unordered_map<Key, double, KeyHash> map_;
};

/// Family term of `spec` for child given parents; the whole-graph score is the
/// sum of these over all families. Cached when a cache is supplied.
double local_score(std::size_t child, std::span<const std::size_t> parents, const CategoricalDataset& data,
                   const ScoreSpec& spec, LocalScoreCache* cache = nullptr);

/// Binding of dataset + spec + cache used by the search procedures.
class LocalScorer {
 public:
  LocalScorer(const CategoricalDataset& data, ScoreSpec spec, LocalScoreCache* cache = nullptr);

  double operator()(std::size_t child, std::span<const std::size_t> parents) const;
  const ScoreSpec& spec() const noexcept { return spec_; }
  const CategoricalDataset& data() const noexcept { return *data_; }
  double total(const Dag& g) const;
  /// Number of calls made through this scorer (cached or not).
  std::size_t evaluations() const noexcept { return evaluations_.load(std::memory_order_relaxed); }

 private:
  const CategoricalDataset* data_;
  ScoreSpec spec_;
  LocalScoreCache* cache_;
  mutable std::atomic<std::size_t> evaluations_{0};
};

}  // namespace bntune
