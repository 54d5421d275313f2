#pragma once

// Categorical datasets: CSV ingestion against a declared schema, cleaning
// rules, simple imputation, contingency counting and k-fold splitting.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <regex>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalbn/error.hpp"
#include "causalbn/random.hpp"

namespace causalbn {

// Reserved cell value for a missing observation; never a state index.
inline constexpr std::int32_t kMissing = -1;

struct Variable {
  std::string name;
  std::vector<std::string> states;
  // Ascending cut points for numeric columns: value v maps to the number of
  // cut points <= v. Empty for plain categorical columns.
  std::vector<double> bins;

  std::size_t cardinality() const noexcept { return states.size(); }

  int state_index(std::string_view label) const {
    for (std::size_t i = 0; i < states.size(); ++i)
      if (states[i] == label) return static_cast<int>(i);
    return kMissing;
  }

  // Maps a raw token to a state index, or kMissing.
  std::int32_t encode(std::string_view token) const {
    if (token.empty()) return kMissing;
    if (int s = state_index(token); s != kMissing) return s;
    if (bins.empty()) return kMissing;
    std::string text(token);
    char* end = nullptr;
    double v = std::strtod(text.c_str(), &end);
    if (end == text.c_str() || *end != '\0' || std::isnan(v)) return kMissing;
    auto idx = std::upper_bound(bins.begin(), bins.end(), v) - bins.begin();
    return static_cast<std::int32_t>(idx);
  }

  void validate() const {
    if (name.empty()) throw DataError("variable with empty name");
    if (states.empty()) throw DataError("variable '" + name + "' has no states");
    for (std::size_t i = 0; i < states.size(); ++i)
      for (std::size_t j = i + 1; j < states.size(); ++j)
        if (states[i] == states[j]) throw DataError("variable '" + name + "' repeats state '" + states[i] + "'");
    if (!bins.empty()) {
      if (!std::is_sorted(bins.begin(), bins.end()) ||
          std::adjacent_find(bins.begin(), bins.end()) != bins.end())
        throw DataError("bins of '" + name + "' must be strictly ascending");
      if (states.size() != bins.size() + 1)
        throw DataError("variable '" + name + "' needs " + std::to_string(bins.size() + 1) + " states for " +
                        std::to_string(bins.size()) + " cut points");
    }
  }
};

class CategoricalDataset {
 public:
  CategoricalDataset() = default;

  // columns[v][row] holds a state index of variable v or kMissing. `raw`, when
  // given, keeps the original text tokens per column for cleaning rules.
  CategoricalDataset(std::vector<Variable> variables, std::vector<std::vector<std::int32_t>> columns,
                     std::vector<std::vector<std::string>> raw = {})
      : vars_(std::move(variables)), cols_(std::move(columns)), raw_(std::move(raw)) {
    if (cols_.size() != vars_.size()) throw DataError("column count does not match variable count");
    rows_ = cols_.empty() ? 0 : cols_.front().size();
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      vars_[v].validate();
      for (std::size_t u = 0; u < v; ++u)
        if (vars_[u].name == vars_[v].name) throw DataError("duplicate variable '" + vars_[v].name + "'");
      if (cols_[v].size() != rows_) throw DataError("ragged column '" + vars_[v].name + "'");
      const auto card = static_cast<std::int32_t>(vars_[v].cardinality());
      for (auto x : cols_[v])
        if (x != kMissing && (x < 0 || x >= card))
          throw DataError("cell value " + std::to_string(x) + " out of range for '" + vars_[v].name + "'");
    }
    if (!raw_.empty()) {
      if (raw_.size() != cols_.size()) throw DataError("raw layer column count mismatch");
      for (const auto& r : raw_)
        if (r.size() != rows_) throw DataError("raw layer row count mismatch");
    }
  }

  std::size_t rows() const noexcept { return rows_; }
  std::size_t variable_count() const noexcept { return vars_.size(); }
  const std::vector<Variable>& variables() const noexcept { return vars_; }
  const Variable& variable(std::size_t v) const { return vars_.at(v); }
  std::size_t cardinality(std::size_t v) const { return vars_.at(v).cardinality(); }

  std::vector<std::string> names() const {
    std::vector<std::string> out;
    for (const auto& v : vars_) out.push_back(v.name);
    return out;
  }

  std::optional<int> find(std::string_view name) const {
    for (std::size_t v = 0; v < vars_.size(); ++v)
      if (vars_[v].name == name) return static_cast<int>(v);
    return std::nullopt;
  }

  int index_of(std::string_view name) const {
    auto v = find(name);
    if (!v) throw DataError("unknown variable '" + std::string(name) + "'");
    return *v;
  }

  std::int32_t at(std::size_t row, std::size_t v) const { return cols_[v][row]; }
  std::span<const std::int32_t> column(std::size_t v) const { return cols_.at(v); }
  const std::vector<std::vector<std::int32_t>>& columns() const noexcept { return cols_; }

  bool has_raw() const noexcept { return !raw_.empty(); }
  const std::vector<std::vector<std::string>>& raw() const noexcept { return raw_; }

  std::size_t missing_count() const {
    std::size_t n = 0;
    for (const auto& c : cols_) n += static_cast<std::size_t>(std::count(c.begin(), c.end(), kMissing));
    return n;
  }
  bool complete() const { return missing_count() == 0; }

  void require_complete(std::string_view what) const {
    if (!complete()) throw DataError(std::string(what) + " requires a complete dataset (missing cells present)");
  }

  CategoricalDataset subset(std::span<const std::size_t> rows) const {
    std::vector<std::vector<std::int32_t>> cols(vars_.size());
    std::vector<std::vector<std::string>> raw(raw_.empty() ? 0 : vars_.size());
    for (std::size_t v = 0; v < vars_.size(); ++v) {
      cols[v].reserve(rows.size());
      for (auto r : rows) cols[v].push_back(cols_[v].at(r));
      if (!raw_.empty())
        for (auto r : rows) raw[v].push_back(raw_[v][r]);
    }
    return CategoricalDataset(vars_, std::move(cols), std::move(raw));
  }

  // Copy restricted to the named variables, in the given order.
  CategoricalDataset select(const std::vector<std::string>& names) const {
    std::vector<Variable> vars;
    std::vector<std::vector<std::int32_t>> cols;
    for (const auto& n : names) {
      auto v = static_cast<std::size_t>(index_of(n));
      vars.push_back(vars_[v]);
      cols.push_back(cols_[v]);
    }
    return CategoricalDataset(std::move(vars), std::move(cols));
  }

  CategoricalDataset without_raw() const { return CategoricalDataset(vars_, cols_); }

  friend bool operator==(const CategoricalDataset& a, const CategoricalDataset& b) {
    if (a.cols_ != b.cols_ || a.vars_.size() != b.vars_.size()) return false;
    for (std::size_t v = 0; v < a.vars_.size(); ++v)
      if (a.vars_[v].name != b.vars_[v].name || a.vars_[v].states != b.vars_[v].states) return false;
    return true;
  }

 private:
  std::vector<Variable> vars_;
  std::vector<std::vector<std::int32_t>> cols_;
  std::vector<std::vector<std::string>> raw_;
  std::size_t rows_ = 0;
};

// ---------------------------------------------------------------------------
// Cleaning rules

struct CleaningRule {
  enum class Action { kSetMissing, kMapToState, kZeroFill };

  std::vector<std::string> variables;
  Action action = Action::kSetMissing;

  // Match predicate; all present conditions must hold. With none present,
  // every non-missing token matches.
  std::optional<double> greater_than;
  std::optional<double> less_than;
  std::optional<std::string> equals;
  std::optional<std::string> matches;  // ECMAScript regex, whole-token match

  // kMapToState: fixed target state, or characters stripped from the end of
  // the token when `state` is empty.
  std::string state;
  std::string strip_suffix;

  bool predicate_matches(const std::string& token) const {
    if (token.empty()) return false;
    if (greater_than || less_than) {
      char* end = nullptr;
      double v = std::strtod(token.c_str(), &end);
      if (end == token.c_str() || *end != '\0') return false;
      if (greater_than && !(v > *greater_than)) return false;
      if (less_than && !(v < *less_than)) return false;
    }
    if (equals && token != *equals) return false;
    if (matches && !std::regex_match(token, std::regex(*matches))) return false;
    return true;
  }
};

using CleaningRules = std::vector<CleaningRule>;

inline void validate_rules(const CleaningRules& rules, const std::vector<Variable>& vars) {
  for (const auto& rule : rules) {
    if (rule.variables.empty()) throw DataError("cleaning rule lists no variables");
    for (const auto& name : rule.variables) {
      auto it = std::find_if(vars.begin(), vars.end(), [&](const Variable& v) { return v.name == name; });
      if (it == vars.end()) throw DataError("cleaning rule references unknown variable '" + name + "'");
      if (rule.action == CleaningRule::Action::kZeroFill && it->state_index(rule.state) == kMissing)
        throw DataError("zero-fill state '" + rule.state + "' is not a state of '" + name + "'");
      if (rule.action == CleaningRule::Action::kMapToState && !rule.state.empty() &&
          it->state_index(rule.state) == kMissing)
        throw DataError("map-to-state target '" + rule.state + "' is not a state of '" + name + "'");
      if (rule.action == CleaningRule::Action::kMapToState && rule.state.empty() && rule.strip_suffix.empty())
        throw DataError("map-to-state rule for '" + name + "' needs 'state' or 'strip_suffix'");
    }
  }
}

inline CleaningRule rule_from_json(const nlohmann::json& j) {
  CleaningRule r;
  if (j.contains("variables"))
    r.variables = j.at("variables").get<std::vector<std::string>>();
  else
    r.variables = {j.at("variable").get<std::string>()};
  const auto action = j.at("action").get<std::string>();
  if (action == "set_missing")
    r.action = CleaningRule::Action::kSetMissing;
  else if (action == "map_to_state")
    r.action = CleaningRule::Action::kMapToState;
  else if (action == "zero_fill")
    r.action = CleaningRule::Action::kZeroFill;
  else
    throw DataError("unknown cleaning action '" + action + "'");
  if (j.contains("when")) {
    const auto& w = j.at("when");
    if (w.contains("greater_than")) r.greater_than = w.at("greater_than").get<double>();
    if (w.contains("less_than")) r.less_than = w.at("less_than").get<double>();
    if (w.contains("equals")) r.equals = w.at("equals").get<std::string>();
    if (w.contains("matches")) r.matches = w.at("matches").get<std::string>();
  }
  r.state = j.value("state", std::string{});
  r.strip_suffix = j.value("strip_suffix", std::string{});
  return r;
}

// Applies rules in declaration order. Tokens come from the raw layer when the
// dataset carries one, otherwise from state labels.
inline CategoricalDataset apply_cleaning(const CategoricalDataset& d, const CleaningRules& rules) {
  validate_rules(rules, d.variables());
  auto cols = d.columns();
  std::vector<std::vector<std::string>> raw = d.raw();
  const bool keep_raw = d.has_raw();
  for (const auto& rule : rules) {
    for (const auto& name : rule.variables) {
      const auto v = static_cast<std::size_t>(d.index_of(name));
      const Variable& var = d.variable(v);
      for (std::size_t row = 0; row < d.rows(); ++row) {
        auto& cell = cols[v][row];
        std::string token;
        if (keep_raw)
          token = raw[v][row];
        else if (cell != kMissing)
          token = var.states[static_cast<std::size_t>(cell)];
        switch (rule.action) {
          case CleaningRule::Action::kSetMissing:
            if (rule.predicate_matches(token)) {
              cell = kMissing;
              if (keep_raw) raw[v][row].clear();
            }
            break;
          case CleaningRule::Action::kMapToState: {
            if (!rule.predicate_matches(token)) break;
            std::string mapped = rule.state;
            if (mapped.empty()) {
              mapped = token;
              while (!mapped.empty() && rule.strip_suffix.find(mapped.back()) != std::string::npos) mapped.pop_back();
            }
            if (auto s = var.encode(mapped); s != kMissing) {
              cell = s;
              if (keep_raw) raw[v][row] = mapped;
            }
            break;
          }
          case CleaningRule::Action::kZeroFill:
            if (cell == kMissing) {
              cell = var.state_index(rule.state);
              if (keep_raw) raw[v][row] = rule.state;
            }
            break;
        }
      }
    }
  }
  return CategoricalDataset(d.variables(), std::move(cols), std::move(raw));
}

// ---------------------------------------------------------------------------
// Schema and CSV ingestion

struct Schema {
  std::vector<Variable> variables;
  CleaningRules cleaning;
};

inline Schema schema_from_json(const nlohmann::json& j) {
  try {
    Schema s;
    for (const auto& v : j.at("variables")) {
      Variable var;
      var.name = v.at("name").get<std::string>();
      var.states = v.at("states").get<std::vector<std::string>>();
      var.bins = v.value("bins", std::vector<double>{});
      var.validate();
      s.variables.push_back(std::move(var));
    }
    for (const auto& r : j.value("cleaning", nlohmann::json::array())) s.cleaning.push_back(rule_from_json(r));
    validate_rules(s.cleaning, s.variables);
    return s;
  } catch (const nlohmann::json::exception& ex) {
    throw DataError(std::string("malformed schema JSON: ") + ex.what());
  }
}

inline nlohmann::json to_json(const Schema& s) {
  nlohmann::json vars = nlohmann::json::array();
  for (const auto& v : s.variables) {
    nlohmann::json jv{{"name", v.name}, {"states", v.states}};
    if (!v.bins.empty()) jv["bins"] = v.bins;
    vars.push_back(jv);
  }
  nlohmann::json rules = nlohmann::json::array();
  for (const auto& r : s.cleaning) {
    nlohmann::json jr{{"variables", r.variables}};
    switch (r.action) {
      case CleaningRule::Action::kSetMissing: jr["action"] = "set_missing"; break;
      case CleaningRule::Action::kMapToState: jr["action"] = "map_to_state"; break;
      case CleaningRule::Action::kZeroFill: jr["action"] = "zero_fill"; break;
    }
    nlohmann::json when = nlohmann::json::object();
    if (r.greater_than) when["greater_than"] = *r.greater_than;
    if (r.less_than) when["less_than"] = *r.less_than;
    if (r.equals) when["equals"] = *r.equals;
    if (r.matches) when["matches"] = *r.matches;
    if (!when.empty()) jr["when"] = when;
    if (!r.state.empty()) jr["state"] = r.state;
    if (!r.strip_suffix.empty()) jr["strip_suffix"] = r.strip_suffix;
    rules.push_back(jr);
  }
  return {{"variables", vars}, {"cleaning", rules}};
}

inline nlohmann::json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& ex) {
    throw DataError("cannot parse '" + path + "': " + ex.what());
  }
}

inline Schema load_schema(const std::string& path) { return schema_from_json(read_json_file(path)); }

namespace detail {

inline std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(b, e - b + 1));
}

// One CSV record, RFC 4180 quoting; fields are trimmed.
inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string field;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    char c = line[i];
    if (quoted) {
      if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        field += '"';
        ++i;
      } else if (c == '"') {
        quoted = false;
      } else {
        field += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      out.push_back(trim(field));
      field.clear();
    } else {
      field += c;
    }
  }
  out.push_back(trim(field));
  return out;
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

// Reads a comma-separated file with a header row. Declared variables must be
// present; extra columns are ignored; tokens outside a variable's states (and
// not binnable) become missing. Raw tokens are retained for cleaning.
inline CategoricalDataset read_csv(std::istream& in, const std::vector<Variable>& schema) {
  std::string line;
  if (!std::getline(in, line) || detail::trim(line).empty()) throw DataError("CSV input is empty");
  auto header = detail::split_csv_line(line);
  std::vector<std::size_t> source;
  for (const auto& var : schema) {
    auto it = std::find(header.begin(), header.end(), var.name);
    if (it == header.end()) throw DataError("declared column '" + var.name + "' missing from CSV header");
    source.push_back(static_cast<std::size_t>(it - header.begin()));
  }
  std::vector<std::vector<std::int32_t>> cols(schema.size());
  std::vector<std::vector<std::string>> raw(schema.size());
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (detail::trim(line).empty()) continue;
    auto fields = detail::split_csv_line(line);
    if (fields.size() != header.size())
      throw DataError("CSV line " + std::to_string(line_no) + " has " + std::to_string(fields.size()) +
                      " fields, header has " + std::to_string(header.size()));
    for (std::size_t v = 0; v < schema.size(); ++v) {
      const auto& tok = fields[source[v]];
      cols[v].push_back(schema[v].encode(tok));
      raw[v].push_back(tok);
    }
  }
  if (cols.empty() || cols.front().empty()) throw DataError("CSV input has no data rows");
  return CategoricalDataset(schema, std::move(cols), std::move(raw));
}

inline CategoricalDataset load_csv(const std::string& path, const std::vector<Variable>& schema) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open '" + path + "'");
  return read_csv(in, schema);
}

// Writes state labels; missing cells are written empty.
inline void write_csv(std::ostream& out, const CategoricalDataset& d) {
  for (std::size_t v = 0; v < d.variable_count(); ++v)
    out << (v ? "," : "") << detail::csv_escape(d.variable(v).name);
  out << '\n';
  for (std::size_t r = 0; r < d.rows(); ++r) {
    for (std::size_t v = 0; v < d.variable_count(); ++v) {
      if (v) out << ',';
      auto x = d.at(r, v);
      if (x != kMissing) out << detail::csv_escape(d.variable(v).states[static_cast<std::size_t>(x)]);
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Imputation

enum class ImputeMethod { kListwiseDelete, kColumnMode };

inline CategoricalDataset impute(const CategoricalDataset& d, ImputeMethod method) {
  if (method == ImputeMethod::kListwiseDelete) {
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < d.rows(); ++r) {
      bool ok = true;
      for (std::size_t v = 0; v < d.variable_count() && ok; ++v) ok = d.at(r, v) != kMissing;
      if (ok) keep.push_back(r);
    }
    if (keep.empty()) throw DataError("listwise deletion removed every row");
    return d.subset(keep).without_raw();
  }
  auto cols = d.columns();
  for (std::size_t v = 0; v < d.variable_count(); ++v) {
    auto& col = cols[v];
    if (std::find(col.begin(), col.end(), kMissing) == col.end()) continue;
    const auto& var = d.variable(v);
    std::vector<std::size_t> freq(var.cardinality(), 0);
    for (auto x : col)
      if (x != kMissing) ++freq[static_cast<std::size_t>(x)];
    std::int32_t mode = kMissing;
    for (std::size_t s = 0; s < freq.size(); ++s) {
      if (freq[s] == 0) continue;
      if (mode == kMissing || freq[s] > freq[static_cast<std::size_t>(mode)] ||
          (freq[s] == freq[static_cast<std::size_t>(mode)] && var.states[s] < var.states[static_cast<std::size_t>(mode)]))
        mode = static_cast<std::int32_t>(s);
    }
    if (mode == kMissing) throw DataError("column '" + var.name + "' has no observed values to impute from");
    std::replace(col.begin(), col.end(), kMissing, mode);
  }
  return CategoricalDataset(d.variables(), std::move(cols));
}

// ---------------------------------------------------------------------------
// Counting

// Joint frequencies of a target against the product of conditioning state
// spaces. Configurations are enumerated with the last conditioning variable
// varying fastest; within a configuration the target state varies fastest.
struct ContingencyTable {
  int target = 0;
  std::vector<int> conditioning;
  std::size_t target_cardinality = 0;
  std::vector<std::size_t> conditioning_cardinalities;
  std::vector<std::uint64_t> counts;

  std::size_t configurations() const { return target_cardinality ? counts.size() / target_cardinality : 0; }
  std::uint64_t at(std::size_t config, std::size_t state) const { return counts.at(config * target_cardinality + state); }
  std::uint64_t total() const {
    std::uint64_t t = 0;
    for (auto c : counts) t += c;
    return t;
  }
};

inline ContingencyTable counts(const CategoricalDataset& d, int target, const std::vector<int>& conditioning) {
  const auto nv = static_cast<int>(d.variable_count());
  if (target < 0 || target >= nv) throw DataError("unknown target variable index");
  for (int z : conditioning) {
    if (z < 0 || z >= nv) throw DataError("unknown conditioning variable index");
    if (z == target) throw DataError("target '" + d.variable(static_cast<std::size_t>(target)).name + "' cannot condition on itself");
  }
  d.require_complete("counts");
  ContingencyTable t;
  t.target = target;
  t.conditioning = conditioning;
  t.target_cardinality = d.cardinality(static_cast<std::size_t>(target));
  double cells = static_cast<double>(t.target_cardinality);
  for (int z : conditioning) {
    t.conditioning_cardinalities.push_back(d.cardinality(static_cast<std::size_t>(z)));
    cells *= static_cast<double>(t.conditioning_cardinalities.back());
  }
  if (cells > 1e8) throw DataError("contingency table too large for dense counting");
  t.counts.assign(static_cast<std::size_t>(cells), 0);
  auto tc = d.column(static_cast<std::size_t>(target));
  for (std::size_t r = 0; r < d.rows(); ++r) {
    std::size_t config = 0;
    for (std::size_t k = 0; k < conditioning.size(); ++k)
      config = config * t.conditioning_cardinalities[k] +
               static_cast<std::size_t>(d.at(r, static_cast<std::size_t>(conditioning[k])));
    ++t.counts[config * t.target_cardinality + static_cast<std::size_t>(tc[r])];
  }
  return t;
}

inline ContingencyTable counts(const CategoricalDataset& d, std::string_view target,
                               const std::vector<std::string>& conditioning) {
  std::vector<int> z;
  for (const auto& c : conditioning) z.push_back(d.index_of(c));
  return counts(d, d.index_of(target), z);
}

// Per-row identifiers of the observed joint configurations of `vars`,
// renumbered densely in order of first appearance when the full product
// would be large. `count` is the number of distinct identifiers in use.
struct ConfigIndex {
  std::vector<std::uint32_t> ids;
  std::size_t count = 1;
};

inline ConfigIndex compact_configs(const CategoricalDataset& d, std::span<const int> vars) {
  const std::size_t n = d.rows();
  ConfigIndex ci;
  ci.ids.assign(n, 0);
  const std::size_t limit = std::max<std::size_t>(4 * n, 1 << 16);
  for (int v : vars) {
    const auto r = d.cardinality(static_cast<std::size_t>(v));
    auto col = d.column(static_cast<std::size_t>(v));
    if (ci.count * r > limit) {
      std::unordered_map<std::uint64_t, std::uint32_t> remap;
      remap.reserve(n);
      for (std::size_t i = 0; i < n; ++i) {
        const std::uint64_t key = static_cast<std::uint64_t>(ci.ids[i]) * r + static_cast<std::uint64_t>(col[i]);
        auto [it, fresh] = remap.try_emplace(key, static_cast<std::uint32_t>(remap.size()));
        ci.ids[i] = it->second;
      }
      ci.count = remap.size();
    } else {
      for (std::size_t i = 0; i < n; ++i)
        ci.ids[i] = static_cast<std::uint32_t>(ci.ids[i] * r + static_cast<std::size_t>(col[i]));
      ci.count *= r;
    }
  }
  return ci;
}

// ---------------------------------------------------------------------------
// Fold splitting

struct Fold {
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

// Shuffles row indices under `seed` and cuts them into k contiguous test
// blocks whose sizes differ by at most one (larger blocks first).
inline std::vector<Fold> kfold_indices(std::size_t n, std::size_t k, std::uint64_t seed) {
  if (k < 2 || k > n)
    throw DataError("fold count " + std::to_string(k) + " must lie in [2, " + std::to_string(n) + "]");
  std::vector<std::size_t> order(n);
  for (std::size_t i = 0; i < n; ++i) order[i] = i;
  Rng rng(seed);
  rng.shuffle(order);
  std::vector<Fold> folds(k);
  std::size_t start = 0;
  for (std::size_t f = 0; f < k; ++f) {
    const std::size_t size = n / k + (f < n % k ? 1 : 0);
    folds[f].test.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(start + size));
    std::sort(folds[f].test.begin(), folds[f].test.end());
    start += size;
  }
  for (std::size_t f = 0; f < k; ++f) {
    for (std::size_t g = 0; g < k; ++g)
      if (g != f) folds[f].train.insert(folds[f].train.end(), folds[g].test.begin(), folds[g].test.end());
    std::sort(folds[f].train.begin(), folds[f].train.end());
  }
  return folds;
}

inline std::vector<std::pair<CategoricalDataset, CategoricalDataset>> kfold_split(const CategoricalDataset& d,
                                                                                  std::size_t k, std::uint64_t seed) {
  std::vector<std::pair<CategoricalDataset, CategoricalDataset>> out;
  for (const auto& f : kfold_indices(d.rows(), k, seed)) out.emplace_back(d.subset(f.train), d.subset(f.test));
  return out;
}

}  // namespace causalbn
