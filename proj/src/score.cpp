#include "bntune/score.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <mutex>
#include <sstream>

#include "bntune/contingency.hpp"
#include "bntune/error.hpp"
#include "bntune/special_functions.hpp"

namespace bntune {

std::string_view to_string(ScoreKind kind) {
  switch (kind) {
    case ScoreKind::LogLikelihood: return "ll";
    case ScoreKind::Bic: return "bic";
    case ScoreKind::Aic: return "aic";
    case ScoreKind::Ebic: return "ebic";
    case ScoreKind::EbicNormalised: return "ebic-norm";
    case ScoreKind::Bdeu: return "bdeu";
  }
  return "?";
}

ScoreKind parse_score_kind(std::string_view name) {
  for (auto k : {ScoreKind::LogLikelihood, ScoreKind::Bic, ScoreKind::Aic, ScoreKind::Ebic, ScoreKind::EbicNormalised,
                 ScoreKind::Bdeu})
    if (to_string(k) == name) return k;
  throw ArgumentError("unknown score '" + std::string(name) + "' (expected ll, bic, aic, ebic, ebic-norm or bdeu)");
}

ScoreSpec ScoreSpec::make(ScoreKind kind, double parameter) {
  switch (kind) {
    case ScoreKind::Ebic: return ebic(parameter);
    case ScoreKind::EbicNormalised: return ebic_normalised(parameter);
    case ScoreKind::Bdeu: return bdeu(parameter);
    default: return {kind};
  }
}

ScoreSpec ScoreSpec::ebic(double gamma) {
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) throw ArgumentError("EBIC gamma must be >= 0");
  ScoreSpec s{ScoreKind::Ebic};
  s.gamma = gamma;
  return s;
}

ScoreSpec ScoreSpec::ebic_normalised(double gamma_prime) {
  if (!(gamma_prime >= 0.0 && gamma_prime <= 1.0)) throw ArgumentError("normalised EBIC gamma' must lie in [0, 1]");
  ScoreSpec s{ScoreKind::EbicNormalised};
  s.gamma_prime = gamma_prime;
  return s;
}

ScoreSpec ScoreSpec::bdeu(double iss) {
  if (!(iss > 0.0) || !std::isfinite(iss)) throw ArgumentError("BDeu iss must be > 0");
  ScoreSpec s{ScoreKind::Bdeu};
  s.iss = iss;
  return s;
}

double ScoreSpec::parameter() const noexcept {
  switch (kind) {
    case ScoreKind::Ebic: return gamma;
    case ScoreKind::EbicNormalised: return gamma_prime;
    case ScoreKind::Bdeu: return iss;
    default: return 0.0;
  }
}

std::string ScoreSpec::label() const {
  std::ostringstream os;
  os << to_string(kind);
  switch (kind) {
    case ScoreKind::Ebic: os << "(gamma=" << gamma << ")"; break;
    case ScoreKind::EbicNormalised: os << "(gamma'=" << gamma_prime << ")"; break;
    case ScoreKind::Bdeu: os << "(iss=" << iss << ")"; break;
    default: break;
  }
  return os.str();
}

FamilyStats family_stats(const CategoricalDataset& data, std::size_t child, std::span<const std::size_t> parents) {
  if (child >= data.vars()) throw ArgumentError("child id out of range");
  for (auto p : parents)
    if (p == child) throw ArgumentError("a node cannot be its own parent");
  FamilyStats st;
  st.child = child;
  st.parents.assign(parents.begin(), parents.end());
  st.r = data.schema().cardinality(child);
  st.n = data.rows();
  for (auto p : parents) st.q *= static_cast<double>(data.schema().cardinality(p));

  const ConfigurationIndex index = index_configurations(data, parents);
  st.counts.assign(index.count * st.r, 0);
  st.row_totals.assign(index.count, 0);
  auto col = data.column(child);
  for (std::size_t i = 0; i < data.rows(); ++i) {
    const auto j = index.row_ids[i];
    ++st.counts[j * st.r + col[i]];
    ++st.row_totals[j];
  }
  return st;
}

double family_log_likelihood(const FamilyStats& st) {
  double ll = 0.0;
  for (std::size_t j = 0; j < st.row_totals.size(); ++j) {
    const double nj = static_cast<double>(st.row_totals[j]);
    for (std::size_t k = 0; k < st.r; ++k) {
      const auto njk = st.counts[j * st.r + k];
      if (njk > 0) ll += static_cast<double>(njk) * std::log(static_cast<double>(njk) / nj);
    }
  }
  return ll;
}

double family_free_parameters(const FamilyStats& st) { return static_cast<double>(st.r - 1) * st.q; }

double family_bdeu(const FamilyStats& st, double iss) {
  if (!(iss > 0.0)) throw ArgumentError("BDeu iss must be > 0");
  const double a_j = iss / st.q;
  const double a_jk = a_j / static_cast<double>(st.r);
  const double lg_aj = log_gamma(a_j);
  const double lg_ajk = log_gamma(a_jk);
  double total = 0.0;
  for (std::size_t j = 0; j < st.row_totals.size(); ++j) {
    double term = lg_aj - log_gamma(a_j + static_cast<double>(st.row_totals[j]));
    for (std::size_t k = 0; k < st.r; ++k) {
      const auto njk = st.counts[j * st.r + k];
      if (njk > 0) term += log_gamma(a_jk + static_cast<double>(njk)) - lg_ajk;
    }
    total += term;
  }
  return total;
}

namespace {

double half_log_n(std::uint64_t n) {
  if (n == 0) throw ArgumentError("penalised likelihood scores need at least one sample");
  return std::log(static_cast<double>(n)) / 2.0;
}

}  // namespace

double family_score(const FamilyStats& st, const ScoreSpec& spec, std::size_t variable_count) {
  switch (spec.kind) {
    case ScoreKind::LogLikelihood: return family_log_likelihood(st);
    case ScoreKind::Bic: return family_log_likelihood(st) - half_log_n(st.n) * family_free_parameters(st);
    case ScoreKind::Aic: half_log_n(st.n); return family_log_likelihood(st) - family_free_parameters(st);
    case ScoreKind::Ebic:
    case ScoreKind::EbicNormalised: {
      const double g = spec.kind == ScoreKind::Ebic ? spec.gamma : spec.gamma_prime;
      const double f = family_free_parameters(st);
      return family_log_likelihood(st) - half_log_n(st.n) * f - g * std::log(static_cast<double>(variable_count)) * f;
    }
    case ScoreKind::Bdeu: return family_bdeu(st, spec.iss);
  }
  throw ArgumentError("unknown score kind");
}

double log_likelihood(const Dag& g, const CategoricalDataset& data) {
  if (g.size() != data.vars()) throw ArgumentError("graph and dataset disagree on the number of variables");
  double ll = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) ll += family_log_likelihood(family_stats(data, i, g.parents(i)));
  return ll;
}

std::int64_t free_parameters(const Dag& g, const Schema& schema) {
  if (g.size() != schema.size()) throw ArgumentError("graph and schema disagree on the number of variables");
  std::int64_t f = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    std::int64_t q = 1;
    for (auto p : g.parents(i)) q *= static_cast<std::int64_t>(schema.cardinality(p));
    f += static_cast<std::int64_t>(schema.cardinality(i) - 1) * q;
  }
  return f;
}

double bic(const Dag& g, const CategoricalDataset& data) { return ebic(g, data, 0.0); }

double aic(const Dag& g, const CategoricalDataset& data) {
  half_log_n(data.rows());
  return log_likelihood(g, data) - static_cast<double>(free_parameters(g, data.schema()));
}

double ebic(const Dag& g, const CategoricalDataset& data, double gamma) {
  if (!(gamma >= 0.0)) throw ArgumentError("EBIC gamma must be >= 0");
  const double penalty = half_log_n(data.rows());
  const double f = static_cast<double>(free_parameters(g, data.schema()));
  const double base = log_likelihood(g, data) - penalty * f;
  return base - gamma * std::log(static_cast<double>(data.vars())) * f;
}

double ebic_normalised(const Dag& g, const CategoricalDataset& data, double gamma_prime) {
  if (!(gamma_prime >= 0.0 && gamma_prime <= 1.0)) throw ArgumentError("normalised EBIC gamma' must lie in [0, 1]");
  return ebic(g, data, gamma_prime);
}

double bdeu(const Dag& g, const CategoricalDataset& data, double iss) {
  if (!(iss > 0.0)) throw ArgumentError("BDeu iss must be > 0");
  if (g.size() != data.vars()) throw ArgumentError("graph and dataset disagree on the number of variables");
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) total += family_bdeu(family_stats(data, i, g.parents(i)), iss);
  return total;
}

double score(const Dag& g, const CategoricalDataset& data, const ScoreSpec& spec) {
  switch (spec.kind) {
    case ScoreKind::LogLikelihood: return log_likelihood(g, data);
    case ScoreKind::Bic: return bic(g, data);
    case ScoreKind::Aic: return aic(g, data);
    case ScoreKind::Ebic: return ebic(g, data, spec.gamma);
    case ScoreKind::EbicNormalised: return ebic_normalised(g, data, spec.gamma_prime);
    case ScoreKind::Bdeu: return bdeu(g, data, spec.iss);
  }
  throw ArgumentError("unknown score kind");
}

double map_gamma_to_prime(double gamma, double gamma_max) {
  if (!(gamma >= 0.0) || !(gamma_max >= 0.0) || gamma > gamma_max)
    throw ArgumentError("gamma must satisfy 0 <= gamma <= gamma_max");
  if (gamma_max == 0.0) return 0.0;
  return gamma / gamma_max;
}

// ---------------------------------------------------------------------------

std::size_t LocalScoreCache::KeyHash::operator()(const Key& k) const noexcept {
  std::uint64_t h = mix64(k.child) ^ (static_cast<std::uint64_t>(k.kind) << 56);
  h = mix64(h ^ std::bit_cast<std::uint64_t>(k.parameter));
  for (auto p : k.parents) h = mix64(h ^ p);
  return static_cast<std::size_t>(h);
}

LocalScoreCache::Key LocalScoreCache::make_key(std::size_t child, std::span<const std::size_t> parents,
                                               const ScoreSpec& spec) {
  Key key{child, {parents.begin(), parents.end()}, spec.kind, spec.parameter()};
  std::sort(key.parents.begin(), key.parents.end());
  return key;
}

bool LocalScoreCache::lookup(std::size_t child, std::span<const std::size_t> parents, const ScoreSpec& spec,
                             double& value) const {
  const Key key = make_key(child, parents, spec);
  std::shared_lock lock(mutex_);
  auto it = map_.find(key);
  if (it == map_.end()) return false;
  value = it->second;
  return true;
}

void LocalScoreCache::insert(std::size_t child, std::span<const std::size_t> parents, const ScoreSpec& spec,
                             double value) {
  Key key = make_key(child, parents, spec);
  std::unique_lock lock(mutex_);
  map_.insert_or_assign(std::move(key), value);
}

std::size_t LocalScoreCache::size() const {
  std::shared_lock lock(mutex_);
  return map_.size();
}

void LocalScoreCache::clear() {
  std::unique_lock lock(mutex_);
  map_.clear();
}

double local_score(std::size_t child, std::span<const std::size_t> parents, const CategoricalDataset& data,
                   const ScoreSpec& spec, LocalScoreCache* cache) {
  double value = 0.0;
  if (cache && cache->lookup(child, parents, spec, value)) return value;
  std::vector<std::size_t> sorted(parents.begin(), parents.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) throw ArgumentError("duplicate parent");
  value = family_score(family_stats(data, child, sorted), spec, data.vars());
  if (cache) cache->insert(child, sorted, spec, value);
  return value;
}

LocalScorer::LocalScorer(const CategoricalDataset& data, ScoreSpec spec, LocalScoreCache* cache)
    : data_(&data), spec_(spec), cache_(cache) {}

double LocalScorer::operator()(std::size_t child, std::span<const std::size_t> parents) const {
  evaluations_.fetch_add(1, std::memory_order_relaxed);
  return local_score(child, parents, *data_, spec_, cache_);
}

double LocalScorer::total(const Dag& g) const {
  double total = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) total += (*this)(i, g.parents(i));
  return total;
}

}  // namespace bntune
