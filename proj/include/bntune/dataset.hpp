#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "bntune/rng.hpp"

namespace bntune {

/// Index of a state within a variable's domain.
using State = std::uint16_t;

struct Variable {
  std::string name;
  std::vector<std::string> states;

  std::size_t cardinality() const noexcept { return states.size(); }

  friend bool operator==(const Variable&, const Variable&) = default;
};

/// Ordered variables with fixed state domains. Every variable has at least two
/// states, variable names are unique and state names are unique per variable.
class Schema {
 public:
  Schema() = default;
  /// Throws ValidationError when an invariant is violated.
  explicit Schema(std::vector<Variable> variables);

  std::size_t size() const noexcept { return variables_.size(); }
  const Variable& variable(std::size_t i) const { return variables_.at(i); }
  const std::vector<Variable>& variables() const noexcept { return variables_; }
  std::size_t cardinality(std::size_t i) const { return variables_.at(i).cardinality(); }
  std::optional<std::size_t> index_of(const std::string& name) const;
  std::vector<std::string> names() const;

  friend bool operator==(const Schema&, const Schema&) = default;

 private:
  std::vector<Variable> variables_;
};

/// n rows of state indices over a Schema, stored column-major. Immutable after
/// construction.
class CategoricalDataset {
 public:
  CategoricalDataset() = default;
  /// `columns[v][row]`. Throws ValidationError on ragged columns or
  /// out-of-domain cells.
  CategoricalDataset(Schema schema, std::vector<std::vector<State>> columns);

  const Schema& schema() const noexcept { return schema_; }
  std::size_t rows() const noexcept { return rows_; }
  std::size_t vars() const noexcept { return schema_.size(); }
  State at(std::size_t row, std::size_t var) const { return columns_[var][row]; }
  std::span<const State> column(std::size_t var) const { return columns_.at(var); }

  /// Dataset made of the given rows (repeats allowed), same schema.
  CategoricalDataset select_rows(std::span<const std::size_t> rows) const;

  /// Dataset whose column i is column order[i] of this one.
  CategoricalDataset permute_columns(std::span<const std::size_t> order) const;

  friend bool operator==(const CategoricalDataset&, const CategoricalDataset&) = default;

 private:
  Schema schema_;
  std::vector<std::vector<State>> columns_;
  std::size_t rows_ = 0;
};

/// Parses CSV text: header row of names, then one row per sample. State
/// domains are the lexicographically sorted distinct strings per column.
CategoricalDataset read_csv(std::istream& in);
CategoricalDataset load_csv(const std::filesystem::path& path);

/// Parses CSV rows against a fixed schema (states looked up by name).
CategoricalDataset read_csv(std::istream& in, const Schema& schema);

void write_csv(std::ostream& out, const CategoricalDataset& data);

struct SplitOptions {
  std::size_t folds = 10;
  Seed seed = 0;
  std::optional<std::size_t> train_cap;
  std::optional<std::size_t> test_cap;
};

/// One bootstrap fold: a training resample of D and an out-of-bag test
/// resample. Row vectors index into the original dataset.
struct ResampledSplit {
  std::size_t fold_index = 0;  // 1-based
  std::vector<std::size_t> train_rows;
  std::vector<std::size_t> test_rows;
  CategoricalDataset train;
  CategoricalDataset test;
};

struct SplitSizes {
  std::size_t train = 0;
  std::size_t test = 0;
};

/// X = floor(n(K-1)/K), Y = floor(n/K), each clipped to its cap when given.
SplitSizes split_sizes(std::size_t n, const SplitOptions& options);

/// K bootstrap folds. Training rows are X draws with replacement from D; test
/// rows are Y draws with replacement from the rows never drawn for training.
/// Fold k uses the stream derive_seed(seed, {k}).
/// Throws ArgumentError for K < 2 or n < K, EmptyOutOfBagError when a fold's
/// training draw covers every row.
std::vector<ResampledSplit> resample_split(const CategoricalDataset& data, const SplitOptions& options);

}  // namespace bntune
