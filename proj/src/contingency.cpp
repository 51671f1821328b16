#include "bntune/contingency.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <tuple>

#include "bntune/error.hpp"

namespace bntune {

namespace {

constexpr std::uint32_t kUnset = std::numeric_limits<std::uint32_t>::max();

// Replaces keys in [0, bound) by their rank among distinct keys, preserving
// order. Returns the number of distinct keys.
std::uint64_t rank_keys(std::vector<std::uint64_t>& keys, std::uint64_t bound) {
  std::vector<std::uint32_t> rank(bound, kUnset);
  for (auto k : keys) rank[k] = 0;
  std::uint32_t next = 0;
  for (auto& r : rank)
    if (r != kUnset) r = next++;
  for (auto& k : keys) k = rank[k];
  return next;
}

void check_var(const CategoricalDataset& data, std::size_t v) {
  if (v >= data.vars()) throw ArgumentError("variable id " + std::to_string(v) + " out of range");
}

}  // namespace

ConfigurationIndex index_configurations(const CategoricalDataset& data, std::span<const std::size_t> vars) {
  const std::size_t n = data.rows();
  ConfigurationIndex out;
  out.row_ids.assign(n, 0);
  if (vars.empty()) {
    out.count = n > 0 ? 1 : 0;
    return out;
  }
  for (auto v : vars) check_var(data, v);

  // Mixed-radix keys, re-ranked whenever the radix product would outgrow a
  // small multiple of n, so every rank pass is a dense O(n) sweep.
  std::vector<std::uint64_t> keys(n, 0);
  std::uint64_t bound = 1;
  const std::uint64_t limit = std::max<std::uint64_t>(8 * static_cast<std::uint64_t>(n), 1024);
  for (auto v : vars) {
    const std::uint64_t r = data.schema().cardinality(v);
    if (bound * r > limit && bound > 1) bound = rank_keys(keys, bound);
    auto col = data.column(v);
    for (std::size_t i = 0; i < n; ++i) keys[i] = keys[i] * r + col[i];
    bound *= r;
  }
  out.count = rank_keys(keys, bound);

  const std::size_t k = vars.size();
  out.states.assign(out.count * k, 0);
  std::vector<char> filled(out.count, 0);
  for (std::size_t i = 0; i < n; ++i) {
    const auto id = static_cast<std::uint32_t>(keys[i]);
    out.row_ids[i] = id;
    if (!filled[id]) {
      filled[id] = 1;
      for (std::size_t j = 0; j < k; ++j) out.states[id * k + j] = data.at(i, vars[j]);
    }
  }
  return out;
}

ContingencyTable::ContingencyTable(std::size_t a_card, std::size_t b_card, std::vector<std::size_t> cond_cards,
                                   std::vector<Stratum> strata, std::vector<Cell> cells, std::vector<State> cond_states)
    : a_card_(a_card),
      b_card_(b_card),
      cond_cards_(std::move(cond_cards)),
      strata_(std::move(strata)),
      cells_(std::move(cells)),
      cond_states_(std::move(cond_states)) {
  if (cond_states_.size() != strata_.size() * cond_cards_.size())
    throw ArgumentError("conditioning tuples do not match the strata");
  a_totals_.assign(strata_.size() * a_card_, 0);
  b_totals_.assign(strata_.size() * b_card_, 0);
  for (std::size_t id = 0; id < strata_.size(); ++id) {
    Stratum& s = strata_[id];
    s.id = id;
    s.total = 0;
    for (const auto& cell : this->cells(s)) {
      s.total += cell.count;
      a_totals_[id * a_card_ + cell.a] += cell.count;
      b_totals_[id * b_card_ + cell.b] += cell.count;
    }
    total_ += s.total;
  }
}

double ContingencyTable::conditioning_configurations() const noexcept {
  double c = 1.0;
  for (auto r : cond_cards_) c *= static_cast<double>(r);
  return c;
}

std::uint64_t ContingencyTable::count(State a, State b, std::span<const State> conditioning) const {
  auto it = std::lower_bound(strata_.begin(), strata_.end(), conditioning, [&](const Stratum& s, std::span<const State> c) {
    const auto t = this->conditioning(s);
    return std::lexicographical_compare(t.begin(), t.end(), c.begin(), c.end());
  });
  if (it == strata_.end()) return 0;
  const auto t = this->conditioning(*it);
  if (!std::equal(t.begin(), t.end(), conditioning.begin(), conditioning.end())) return 0;
  for (const auto& cell : cells(*it))
    if (cell.a == a && cell.b == b) return cell.count;
  return 0;
}

ContingencyTable ContingencyTable::transposed() const {
  std::vector<Stratum> strata = strata_;
  std::vector<Cell> cells;
  cells.reserve(cells_.size());
  for (auto& s : strata) {
    auto span = this->cells(s);
    std::vector<Cell> local(span.begin(), span.end());
    for (auto& c : local) std::swap(c.a, c.b);
    std::sort(local.begin(), local.end(), [](const Cell& x, const Cell& y) { return std::tie(x.a, x.b) < std::tie(y.a, y.b); });
    s.first_cell = cells.size();
    cells.insert(cells.end(), local.begin(), local.end());
  }
  return ContingencyTable(b_card_, a_card_, cond_cards_, std::move(strata), std::move(cells), cond_states_);
}

ContingencyTable contingency(const CategoricalDataset& data, std::size_t a, std::size_t b,
                             std::span<const std::size_t> cond) {
  check_var(data, a);
  check_var(data, b);
  if (a == b) throw ArgumentError("contingency of a variable with itself");
  for (auto c : cond)
    if (c == a || c == b) throw ArgumentError("conditioning set contains a tested variable");

  const std::size_t ra = data.schema().cardinality(a);
  const std::size_t rb = data.schema().cardinality(b);
  std::vector<std::size_t> cond_cards;
  for (auto c : cond) cond_cards.push_back(data.schema().cardinality(c));

  ConfigurationIndex index = index_configurations(data, cond);
  const std::size_t n = data.rows();
  const std::size_t ab = ra * rb;
  const std::size_t S = index.count;
  auto col_a = data.column(a);
  auto col_b = data.column(b);

  std::vector<ContingencyTable::Stratum> strata(S);
  std::vector<ContingencyTable::Cell> cells;
  auto emit = [&](std::size_t s, std::size_t cell, std::uint64_t count) {
    cells.push_back({static_cast<State>(cell / rb), static_cast<State>(cell % rb), count});
    ++strata[s].cell_count;
  };

  if (static_cast<std::uint64_t>(S) * ab <= std::max<std::uint64_t>(4 * static_cast<std::uint64_t>(n), 64)) {
    std::vector<std::uint64_t> dense(S * ab, 0);
    for (std::size_t i = 0; i < n; ++i) ++dense[index.row_ids[i] * ab + col_a[i] * rb + col_b[i]];
    for (std::size_t s = 0; s < S; ++s) {
      strata[s].first_cell = cells.size();
      for (std::size_t x = 0; x < ab; ++x)
        if (dense[s * ab + x] > 0) emit(s, x, dense[s * ab + x]);
    }
  } else {
    // Many sparse strata: bucket rows by stratum, then count each stratum in
    // a shared scratch row, visiting only the touched cells.
    std::vector<std::size_t> offset(S + 1, 0);
    for (auto id : index.row_ids) ++offset[id + 1];
    for (std::size_t s = 0; s < S; ++s) offset[s + 1] += offset[s];
    std::vector<std::uint32_t> order(n);
    std::vector<std::size_t> next(offset.begin(), offset.end() - 1);
    for (std::size_t i = 0; i < n; ++i) order[next[index.row_ids[i]]++] = static_cast<std::uint32_t>(i);

    std::vector<std::uint64_t> scratch(ab, 0);
    std::vector<std::size_t> touched;
    for (std::size_t s = 0; s < S; ++s) {
      strata[s].first_cell = cells.size();
      touched.clear();
      for (std::size_t j = offset[s]; j < offset[s + 1]; ++j) {
        const std::size_t i = order[j];
        const std::size_t x = col_a[i] * rb + col_b[i];
        if (scratch[x]++ == 0) touched.push_back(x);
      }
      std::sort(touched.begin(), touched.end());
      for (auto x : touched) {
        emit(s, x, scratch[x]);
        scratch[x] = 0;
      }
    }
  }
  return ContingencyTable(ra, rb, std::move(cond_cards), std::move(strata), std::move(cells), std::move(index.states));
}

ContingencyTable contingency_from_counts(const std::vector<std::vector<std::uint64_t>>& counts) {
  if (counts.empty() || counts.front().empty()) throw ArgumentError("empty count matrix");
  const std::size_t ra = counts.size();
  const std::size_t rb = counts.front().size();
  ContingencyTable::Stratum s;
  std::vector<ContingencyTable::Cell> cells;
  for (std::size_t x = 0; x < ra; ++x) {
    if (counts[x].size() != rb) throw ArgumentError("ragged count matrix");
    for (std::size_t y = 0; y < rb; ++y) {
      if (counts[x][y] == 0) continue;
      cells.push_back({static_cast<State>(x), static_cast<State>(y), counts[x][y]});
      s.total += counts[x][y];
    }
  }
  s.cell_count = cells.size();
  std::vector<ContingencyTable::Stratum> strata;
  if (s.total > 0) strata.push_back(std::move(s));
  return ContingencyTable(ra, rb, {}, std::move(strata), std::move(cells));
}

}  // namespace bntune
