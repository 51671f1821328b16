#include "bntune/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <set>
#include <sstream>
#include <unordered_map>

#include "bntune/error.hpp"

namespace bntune {

Schema::Schema(std::vector<Variable> variables) : variables_(std::move(variables)) {
  std::set<std::string> names;
  for (const auto& v : variables_) {
    if (v.name.empty()) throw ValidationError("variable with empty name");
    if (!names.insert(v.name).second) throw ValidationError("duplicate variable name '" + v.name + "'");
    if (v.states.size() < 2)
      throw ValidationError("variable '" + v.name + "' has " + std::to_string(v.states.size()) +
                            " state(s); at least 2 are required");
    if (v.states.size() > std::numeric_limits<State>::max())
      throw ValidationError("variable '" + v.name + "' has too many states");
    std::set<std::string> states(v.states.begin(), v.states.end());
    if (states.size() != v.states.size()) throw ValidationError("duplicate state name in variable '" + v.name + "'");
  }
}

std::optional<std::size_t> Schema::index_of(const std::string& name) const {
  for (std::size_t i = 0; i < variables_.size(); ++i)
    if (variables_[i].name == name) return i;
  return std::nullopt;
}

std::vector<std::string> Schema::names() const {
  std::vector<std::string> out;
  out.reserve(variables_.size());
  for (const auto& v : variables_) out.push_back(v.name);
  return out;
}

CategoricalDataset::CategoricalDataset(Schema schema, std::vector<std::vector<State>> columns)
    : schema_(std::move(schema)), columns_(std::move(columns)) {
  if (columns_.size() != schema_.size())
    throw ValidationError("dataset has " + std::to_string(columns_.size()) + " columns but schema has " +
                          std::to_string(schema_.size()) + " variables");
  rows_ = columns_.empty() ? 0 : columns_.front().size();
  for (std::size_t v = 0; v < columns_.size(); ++v) {
    if (columns_[v].size() != rows_) throw ValidationError("ragged dataset columns");
    const auto card = schema_.cardinality(v);
    for (State s : columns_[v])
      if (s >= card) throw ValidationError("cell out of domain in column '" + schema_.variable(v).name + "'");
  }
}

CategoricalDataset CategoricalDataset::select_rows(std::span<const std::size_t> rows) const {
  std::vector<std::vector<State>> cols(columns_.size());
  for (std::size_t v = 0; v < columns_.size(); ++v) {
    auto& col = cols[v];
    col.reserve(rows.size());
    for (std::size_t r : rows) col.push_back(columns_[v].at(r));
  }
  CategoricalDataset out;
  out.schema_ = schema_;
  out.columns_ = std::move(cols);
  out.rows_ = rows.size();
  return out;
}

CategoricalDataset CategoricalDataset::permute_columns(std::span<const std::size_t> order) const {
  if (order.size() != vars()) throw ArgumentError("column permutation has wrong length");
  std::vector<Variable> vars;
  std::vector<std::vector<State>> cols;
  for (std::size_t i : order) {
    vars.push_back(schema_.variable(i));
    cols.push_back(columns_.at(i));
  }
  return CategoricalDataset(Schema(std::move(vars)), std::move(cols));
}

namespace {

std::vector<std::string> split_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::string field;
  std::istringstream ss(line);
  while (std::getline(ss, field, ',')) fields.push_back(field);
  if (!line.empty() && line.back() == ',') fields.emplace_back();
  return fields;
}

bool blank(const std::string& line) {
  return std::all_of(line.begin(), line.end(), [](char c) { return c == ' ' || c == '\r' || c == '\t'; });
}

struct RawCsv {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

RawCsv read_raw(std::istream& in) {
  RawCsv raw;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line_no == 1 && line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) line.erase(0, 3);
    if (blank(line)) continue;
    auto fields = split_line(line);
    if (raw.header.empty()) {
      raw.header = std::move(fields);
      continue;
    }
    if (fields.size() != raw.header.size())
      throw ParseError("CSV row " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                       " fields, expected " + std::to_string(raw.header.size()));
    raw.rows.push_back(std::move(fields));
  }
  if (raw.header.empty()) throw ParseError("empty CSV input");
  return raw;
}

}  // namespace

CategoricalDataset read_csv(std::istream& in) {
  RawCsv raw = read_raw(in);
  const std::size_t v_count = raw.header.size();
  std::vector<Variable> vars(v_count);
  for (std::size_t v = 0; v < v_count; ++v) {
    std::set<std::string> seen;
    for (const auto& row : raw.rows) seen.insert(row[v]);
    vars[v].name = raw.header[v];
    vars[v].states.assign(seen.begin(), seen.end());
  }
  Schema schema(vars);

  std::vector<std::vector<State>> cols(v_count);
  for (std::size_t v = 0; v < v_count; ++v) {
    std::map<std::string, State> lookup;
    for (std::size_t s = 0; s < vars[v].states.size(); ++s) lookup.emplace(vars[v].states[s], static_cast<State>(s));
    cols[v].reserve(raw.rows.size());
    for (const auto& row : raw.rows) cols[v].push_back(lookup.at(row[v]));
  }
  return CategoricalDataset(std::move(schema), std::move(cols));
}

CategoricalDataset read_csv(std::istream& in, const Schema& schema) {
  RawCsv raw = read_raw(in);
  const std::size_t v_count = schema.size();
  std::vector<std::size_t> source(v_count);
  for (std::size_t v = 0; v < v_count; ++v) {
    auto it = std::find(raw.header.begin(), raw.header.end(), schema.variable(v).name);
    if (it == raw.header.end()) throw ValidationError("CSV lacks column '" + schema.variable(v).name + "'");
    source[v] = static_cast<std::size_t>(it - raw.header.begin());
  }
  std::vector<std::vector<State>> cols(v_count);
  for (std::size_t v = 0; v < v_count; ++v) {
    std::unordered_map<std::string, State> lookup;
    const auto& states = schema.variable(v).states;
    for (std::size_t s = 0; s < states.size(); ++s) lookup.emplace(states[s], static_cast<State>(s));
    cols[v].reserve(raw.rows.size());
    for (std::size_t r = 0; r < raw.rows.size(); ++r) {
      auto it = lookup.find(raw.rows[r][source[v]]);
      if (it == lookup.end())
        throw ValidationError("unknown state '" + raw.rows[r][source[v]] + "' for variable '" +
                              schema.variable(v).name + "' in data row " + std::to_string(r + 1));
      cols[v].push_back(it->second);
    }
  }
  return CategoricalDataset(schema, std::move(cols));
}

CategoricalDataset load_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path.string() + "'");
  return read_csv(in);
}

void write_csv(std::ostream& out, const CategoricalDataset& data) {
  const auto& schema = data.schema();
  for (std::size_t v = 0; v < schema.size(); ++v) out << (v ? "," : "") << schema.variable(v).name;
  out << '\n';
  for (std::size_t r = 0; r < data.rows(); ++r) {
    for (std::size_t v = 0; v < schema.size(); ++v) out << (v ? "," : "") << schema.variable(v).states[data.at(r, v)];
    out << '\n';
  }
}

SplitSizes split_sizes(std::size_t n, const SplitOptions& options) {
  const std::size_t k = options.folds;
  SplitSizes s{n * (k - 1) / k, n / k};
  if (options.train_cap) s.train = std::min(s.train, *options.train_cap);
  if (options.test_cap) s.test = std::min(s.test, *options.test_cap);
  return s;
}

std::vector<ResampledSplit> resample_split(const CategoricalDataset& data, const SplitOptions& options) {
  if (options.folds < 2) throw ArgumentError("resampling needs at least 2 folds, got " + std::to_string(options.folds));
  const std::size_t n = data.rows();
  if (n < options.folds)
    throw ArgumentError("dataset has " + std::to_string(n) + " rows, fewer than " + std::to_string(options.folds) +
                        " folds");
  const SplitSizes sizes = split_sizes(n, options);
  if (sizes.train == 0 || sizes.test == 0) throw ArgumentError("resampling caps must be positive");

  std::vector<ResampledSplit> splits;
  splits.reserve(options.folds);
  std::vector<char> drawn(n);
  std::vector<std::size_t> pool;
  for (std::size_t k = 1; k <= options.folds; ++k) {
    Rng rng(derive_seed(options.seed, {k}));
    ResampledSplit split;
    split.fold_index = k;
    split.train_rows.resize(sizes.train);
    std::fill(drawn.begin(), drawn.end(), 0);
    for (auto& r : split.train_rows) {
      r = rng.uniform_index(n);
      drawn[r] = 1;
    }
    pool.clear();
    for (std::size_t r = 0; r < n; ++r)
      if (!drawn[r]) pool.push_back(r);
    if (pool.empty())
      throw EmptyOutOfBagError(k, "fold " + std::to_string(k) +
                                      ": out-of-bag pool is empty (dataset too small for bootstrap testing)");
    split.test_rows.resize(sizes.test);
    for (auto& r : split.test_rows) r = pool[rng.uniform_index(pool.size())];
    split.train = data.select_rows(split.train_rows);
    split.test = data.select_rows(split.test_rows);
    splits.push_back(std::move(split));
  }
  return splits;
}

}  // namespace bntune
