#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "bntune/dataset.hpp"

namespace bntune {

/// Per-row configuration ids for a set of variables. Ids are dense in
/// [0, count) and ordered lexicographically by the state tuple (first variable
/// most significant); only observed configurations receive an id.
struct ConfigurationIndex {
  std::vector<std::uint32_t> row_ids;
  /// State tuple of each id, flattened: tuple(id) = states[id*k .. id*k+k).
  std::vector<State> states;
  std::size_t count = 0;
};

ConfigurationIndex index_configurations(const CategoricalDataset& data, std::span<const std::size_t> vars);

/// Sparse joint counts n_abc of a variable pair (A, B) given a conditioning
/// set C. Only observed strata (configurations of C) and observed cells are
/// stored; strata are ordered by their C tuple and cells by (a, b).
class ContingencyTable {
 public:
  struct Cell {
    State a;
    State b;
    std::uint64_t count;
  };

  /// One observed configuration c of the conditioning set.
  struct Stratum {
    std::size_t id = 0;          // position in strata()
    std::uint64_t total = 0;     // n_c
    std::size_t first_cell = 0;
    std::size_t cell_count = 0;
  };

  /// `cond_states` holds the C tuple of every stratum, flattened. Totals are
  /// derived from the cells.
  ContingencyTable(std::size_t a_card, std::size_t b_card, std::vector<std::size_t> cond_cards,
                   std::vector<Stratum> strata, std::vector<Cell> cells, std::vector<State> cond_states = {});

  std::size_t a_cardinality() const noexcept { return a_card_; }
  std::size_t b_cardinality() const noexcept { return b_card_; }
  const std::vector<std::size_t>& conditioning_cardinalities() const noexcept { return cond_cards_; }
  /// |C| = product of conditioning cardinalities, as a double (may be huge).
  double conditioning_configurations() const noexcept;

  std::uint64_t total() const noexcept { return total_; }
  const std::vector<Stratum>& strata() const noexcept { return strata_; }
  std::span<const Cell> cells(const Stratum& s) const { return {cells_.data() + s.first_cell, s.cell_count}; }
  std::span<const Cell> cells() const noexcept { return cells_; }
  /// The C tuple of a stratum.
  std::span<const State> conditioning(const Stratum& s) const {
    return {cond_states_.data() + s.id * cond_cards_.size(), cond_cards_.size()};
  }
  /// n_ac, length |A|.
  std::span<const std::uint64_t> a_totals(const Stratum& s) const { return {a_totals_.data() + s.id * a_card_, a_card_}; }
  /// n_bc, length |B|.
  std::span<const std::uint64_t> b_totals(const Stratum& s) const { return {b_totals_.data() + s.id * b_card_, b_card_}; }

  /// n_abc; 0 for unobserved cells.
  std::uint64_t count(State a, State b, std::span<const State> conditioning = {}) const;

  /// Same table with the roles of A and B exchanged.
  ContingencyTable transposed() const;

 private:
  std::size_t a_card_;
  std::size_t b_card_;
  std::vector<std::size_t> cond_cards_;
  std::vector<Stratum> strata_;
  std::vector<Cell> cells_;
  std::vector<State> cond_states_;
  std::vector<std::uint64_t> a_totals_;
  std::vector<std::uint64_t> b_totals_;
  std::uint64_t total_ = 0;
};

/// Counts (a, b, cond) over every row of the data. Throws ArgumentError for
/// out-of-range ids, a == b, or a/b inside cond.
ContingencyTable contingency(const CategoricalDataset& data, std::size_t a, std::size_t b,
                             std::span<const std::size_t> cond = {});

/// Builds a table from dense unconditional counts, counts[a][b].
ContingencyTable contingency_from_counts(const std::vector<std::vector<std::uint64_t>>& counts);

}  // namespace bntune
