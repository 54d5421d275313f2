#pragma once

// Discrete causal Bayesian networks: maximum-likelihood / smoothed fitting,
// exact inference by variable elimination, forward sampling, and
// interventional queries by graph surgery.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalbn/dataset.hpp"
#include "causalbn/error.hpp"
#include "causalbn/graph.hpp"
#include "causalbn/random.hpp"

namespace causalbn {

// P(node | parents). Rows follow parent configurations with the last parent
// varying fastest; within a row, one entry per node state.
struct Cpt {
  std::vector<int> parents;
  std::vector<std::size_t> parent_cardinalities;
  std::size_t cardinality = 0;
  std::vector<double> table;

  std::size_t configurations() const { return cardinality ? table.size() / cardinality : 0; }
  double at(std::size_t config, std::size_t state) const { return table[config * cardinality + state]; }

  // Row index for a full assignment indexed by node.
  template <typename Assignment>
  std::size_t config_of(const Assignment& values) const {
    std::size_t c = 0;
    for (std::size_t i = 0; i < parents.size(); ++i)
      c = c * parent_cardinalities[i] + static_cast<std::size_t>(values[static_cast<std::size_t>(parents[i])]);
    return c;
  }
};

class DiscreteBayesNet {
 public:
  DiscreteBayesNet() = default;

  // tables[i] lists P(node i | parents of i in graph order) row-major.
  DiscreteBayesNet(Dag dag, std::vector<Variable> variables, std::vector<std::vector<double>> tables)
      : dag_(std::move(dag)), vars_(std::move(variables)) {
    if (vars_.size() != dag_.size()) throw InferenceError("variable count does not match graph size");
    if (tables.size() != dag_.size()) throw InferenceError("one table per node is required");
    for (std::size_t i = 0; i < vars_.size(); ++i) {
      vars_[i].validate();
      if (vars_[i].name != dag_.name(static_cast<int>(i)))
        throw InferenceError("variable '" + vars_[i].name + "' does not match node '" + dag_.name(static_cast<int>(i)) + "'");
      Cpt c;
      c.parents = dag_.parents(static_cast<int>(i));
      for (int p : c.parents) c.parent_cardinalities.push_back(vars_[static_cast<std::size_t>(p)].cardinality());
      c.cardinality = vars_[i].cardinality();
      std::size_t rows = 1;
      for (auto k : c.parent_cardinalities) rows *= k;
      if (tables[i].size() != rows * c.cardinality)
        throw InferenceError("table of '" + vars_[i].name + "' has " + std::to_string(tables[i].size()) +
                             " entries, expected " + std::to_string(rows * c.cardinality));
      c.table = std::move(tables[i]);
      for (std::size_t r = 0; r < rows; ++r) {
        double s = 0;
        for (std::size_t k = 0; k < c.cardinality; ++k) {
          double v = c.table[r * c.cardinality + k];
          if (!(v >= 0) || !std::isfinite(v)) throw InferenceError("negative or non-finite entry in table of '" + vars_[i].name + "'");
          s += v;
        }
        if (std::abs(s - 1.0) > 1e-9)
          throw InferenceError("row " + std::to_string(r) + " of '" + vars_[i].name + "' sums to " + std::to_string(s));
      }
      cpts_.push_back(std::move(c));
    }
  }

  const Dag& dag() const { return dag_; }
  const std::vector<Variable>& variables() const { return vars_; }
  std::size_t size() const { return vars_.size(); }
  const Variable& variable(int i) const { return vars_.at(static_cast<std::size_t>(i)); }
  std::size_t cardinality(int i) const { return variable(i).cardinality(); }
  const Cpt& cpt(int i) const { return cpts_.at(static_cast<std::size_t>(i)); }
  int index_of(std::string_view name) const { return dag_.index_of(name); }

  int state_index(int node, std::string_view label) const {
    int s = variable(node).state_index(label);
    if (s < 0) throw InferenceError("variable '" + variable(node).name + "' has no state '" + std::string(label) + "'");
    return s;
  }

 private:
  Dag dag_;
  std::vector<Variable> vars_;
  std::vector<Cpt> cpts_;
};

// Estimates every table from complete data: (count + s) / (total + s * r);
// with s = 0 an unseen parent configuration gets the uniform row.
inline DiscreteBayesNet fit(const Dag& g, const CategoricalDataset& d, double smoothing = 1.0) {
  d.require_complete("parameter fitting");
  if (smoothing < 0) throw DataError("smoothing must be non-negative");
  if (g.size() != d.variable_count()) throw DataError("graph and dataset have different variable counts");
  std::vector<int> var(g.size());
  std::vector<Variable> vars;
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    auto v = d.find(g.name(i));
    if (!v) throw DataError("graph node '" + g.name(i) + "' is not a dataset variable");
    var[static_cast<std::size_t>(i)] = *v;
    vars.push_back(d.variable(static_cast<std::size_t>(*v)));
  }
  std::vector<std::vector<double>> tables;
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    std::vector<int> pa;
    for (int p : g.parents(i)) pa.push_back(var[static_cast<std::size_t>(p)]);
    auto t = counts(d, var[static_cast<std::size_t>(i)], pa);
    const std::size_t r = t.target_cardinality;
    std::vector<double> table(t.counts.size());
    for (std::size_t c = 0; c < t.configurations(); ++c) {
      double total = 0;
      for (std::size_t k = 0; k < r; ++k) total += static_cast<double>(t.at(c, k));
      const double denom = total + smoothing * static_cast<double>(r);
      for (std::size_t k = 0; k < r; ++k)
        table[c * r + k] = denom > 0 ? (static_cast<double>(t.at(c, k)) + smoothing) / denom : 1.0 / static_cast<double>(r);
    }
    tables.push_back(std::move(table));
  }
  return DiscreteBayesNet(g, std::move(vars), std::move(tables));
}

// Node index -> state index.
using Assignment = std::map<int, int>;

namespace detail {

// Factor over variables `vars` (ascending node index), last one fastest.
struct Factor {
  std::vector<int> vars;
  std::vector<std::size_t> cards;
  std::vector<double> values;
};

inline constexpr std::size_t kMaxFactorEntries = std::size_t{1} << 26;

inline Factor cpt_factor(const DiscreteBayesNet& net, int node, const Assignment& evidence) {
  const auto& c = net.cpt(node);
  std::vector<int> scope = c.parents;
  scope.push_back(node);
  std::vector<int> free;
  for (int v : scope)
    if (!evidence.count(v)) free.push_back(v);
  std::sort(free.begin(), free.end());
  Factor f;
  f.vars = free;
  for (int v : free) f.cards.push_back(net.cardinality(v));
  std::size_t size = 1;
  for (auto k : f.cards) size *= k;
  f.values.assign(size, 0.0);
  std::vector<int> value(net.size(), 0);
  for (const auto& [v, s] : evidence) value[static_cast<std::size_t>(v)] = s;
  for (std::size_t idx = 0; idx < size; ++idx) {
    std::size_t rem = idx;
    for (std::size_t j = free.size(); j-- > 0;) {
      value[static_cast<std::size_t>(free[j])] = static_cast<int>(rem % f.cards[j]);
      rem /= f.cards[j];
    }
    f.values[idx] = c.at(c.config_of(value), static_cast<std::size_t>(value[static_cast<std::size_t>(node)]));
  }
  return f;
}

inline Factor multiply(const Factor& a, const Factor& b) {
  Factor f;
  std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(f.vars));
  std::size_t size = 1;
  std::vector<std::size_t> ia, ib;  // position of each result var in a / b, or npos
  for (int v : f.vars) {
    auto pa = std::find(a.vars.begin(), a.vars.end(), v);
    auto pb = std::find(b.vars.begin(), b.vars.end(), v);
    std::size_t card = pa != a.vars.end() ? a.cards[static_cast<std::size_t>(pa - a.vars.begin())]
                                          : b.cards[static_cast<std::size_t>(pb - b.vars.begin())];
    f.cards.push_back(card);
    size *= card;
    if (size > kMaxFactorEntries)
      throw InferenceError("intermediate factor too large for exact inference; use forward sampling instead");
  }
  auto strides = [](const Factor& x) {
    std::vector<std::size_t> s(x.vars.size());
    std::size_t acc = 1;
    for (std::size_t j = x.vars.size(); j-- > 0;) {
      s[j] = acc;
      acc *= x.cards[j];
    }
    return s;
  };
  auto sa = strides(a), sb = strides(b);
  std::vector<std::size_t> step_a(f.vars.size(), 0), step_b(f.vars.size(), 0);
  for (std::size_t j = 0; j < f.vars.size(); ++j) {
    auto pa = std::find(a.vars.begin(), a.vars.end(), f.vars[j]);
    auto pb = std::find(b.vars.begin(), b.vars.end(), f.vars[j]);
    if (pa != a.vars.end()) step_a[j] = sa[static_cast<std::size_t>(pa - a.vars.begin())];
    if (pb != b.vars.end()) step_b[j] = sb[static_cast<std::size_t>(pb - b.vars.begin())];
  }
  f.values.resize(size);
  std::vector<std::size_t> digit(f.vars.size(), 0);
  std::size_t oa = 0, ob = 0;
  for (std::size_t idx = 0; idx < size; ++idx) {
    f.values[idx] = a.values[oa] * b.values[ob];
    for (std::size_t j = f.vars.size(); j-- > 0;) {
      if (++digit[j] < f.cards[j]) {
        oa += step_a[j];
        ob += step_b[j];
        break;
      }
      digit[j] = 0;
      oa -= step_a[j] * (f.cards[j] - 1);
      ob -= step_b[j] * (f.cards[j] - 1);
    }
  }
  return f;
}

inline Factor sum_out(const Factor& a, int var) {
  auto pos = static_cast<std::size_t>(std::find(a.vars.begin(), a.vars.end(), var) - a.vars.begin());
  Factor f;
  for (std::size_t j = 0; j < a.vars.size(); ++j)
    if (j != pos) {
      f.vars.push_back(a.vars[j]);
      f.cards.push_back(a.cards[j]);
    }
  std::size_t inner = 1;
  for (std::size_t j = pos + 1; j < a.vars.size(); ++j) inner *= a.cards[j];
  const std::size_t card = a.cards[pos];
  const std::size_t outer = a.values.size() / (inner * card);
  f.values.assign(outer * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o)
    for (std::size_t k = 0; k < card; ++k)
      for (std::size_t i = 0; i < inner; ++i) f.values[o * inner + i] += a.values[(o * card + k) * inner + i];
  return f;
}

inline std::vector<char> ancestral_set(const Dag& g, const std::vector<int>& seeds) {
  std::vector<char> keep(g.size(), 0);
  std::vector<int> stack(seeds.begin(), seeds.end());
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (keep[static_cast<std::size_t>(v)]) continue;
    keep[static_cast<std::size_t>(v)] = 1;
    for (int p : g.parents(v)) stack.push_back(p);
  }
  return keep;
}

inline void check_assignment(const DiscreteBayesNet& net, const Assignment& a, const char* what) {
  for (const auto& [v, s] : a) {
    if (v < 0 || v >= static_cast<int>(net.size())) throw InferenceError(std::string(what) + " on unknown node");
    if (s < 0 || s >= static_cast<int>(net.cardinality(v)))
      throw InferenceError(std::string(what) + " state out of range for '" + net.variable(v).name + "'");
  }
}

}  // namespace detail

// Exact posterior distribution of `target` given evidence, by variable
// elimination over the ancestral set (barren nodes pruned) with a greedy
// min-degree order; ties go to the smaller name.
inline std::vector<double> posterior(const DiscreteBayesNet& net, int target, const Assignment& evidence = {}) {
  detail::check_assignment(net, evidence, "evidence");
  const auto& g = net.dag();
  const std::size_t r = net.cardinality(target);
  if (auto it = evidence.find(target); it != evidence.end()) {
    std::vector<double> out(r, 0.0);
    out[static_cast<std::size_t>(it->second)] = 1.0;
    // The evidence itself must still be possible.
    Assignment rest = evidence;
    rest.erase(target);
    if (posterior(net, target, rest)[static_cast<std::size_t>(it->second)] <= 0)
      throw InferenceError("evidence has zero probability");
    return out;
  }
  std::vector<int> seeds{target};
  for (const auto& [v, s] : evidence) seeds.push_back(v);
  auto keep = detail::ancestral_set(g, seeds);

  std::vector<detail::Factor> factors;
  for (int v = 0; v < static_cast<int>(g.size()); ++v)
    if (keep[static_cast<std::size_t>(v)]) factors.push_back(detail::cpt_factor(net, v, evidence));

  std::vector<int> hidden;
  for (int v = 0; v < static_cast<int>(g.size()); ++v)
    if (keep[static_cast<std::size_t>(v)] && v != target && !evidence.count(v)) hidden.push_back(v);

  while (!hidden.empty()) {
    // Degree of v in the current interaction graph.
    std::size_t best_i = 0, best_deg = 0;
    for (std::size_t i = 0; i < hidden.size(); ++i) {
      std::vector<int> nb;
      for (const auto& f : factors)
        if (std::binary_search(f.vars.begin(), f.vars.end(), hidden[i])) nb.insert(nb.end(), f.vars.begin(), f.vars.end());
      std::sort(nb.begin(), nb.end());
      nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
      std::size_t deg = nb.empty() ? 0 : nb.size() - 1;
      if (i == 0 || deg < best_deg || (deg == best_deg && g.rank(hidden[i]) < g.rank(hidden[best_i]))) {
        best_i = i;
        best_deg = deg;
      }
    }
    const int v = hidden[best_i];
    hidden.erase(hidden.begin() + static_cast<std::ptrdiff_t>(best_i));
    std::optional<detail::Factor> prod;
    std::vector<detail::Factor> rest;
    for (auto& f : factors) {
      if (std::binary_search(f.vars.begin(), f.vars.end(), v))
        prod = prod ? detail::multiply(*prod, f) : std::move(f);
      else
        rest.push_back(std::move(f));
    }
    if (prod) rest.push_back(detail::sum_out(*prod, v));
    factors = std::move(rest);
  }
  detail::Factor result{{}, {}, {1.0}};
  for (const auto& f : factors) result = detail::multiply(result, f);
  std::vector<double> out(r, 0.0);
  if (result.vars.empty()) {
    // Target pruned away cannot happen; guard anyway.
    throw InferenceError("target eliminated during inference");
  }
  double z = 0;
  for (std::size_t k = 0; k < r; ++k) z += result.values[k];
  if (!(z > 0)) throw InferenceError("evidence has zero probability");
  for (std::size_t k = 0; k < r; ++k) out[k] = result.values[k] / z;
  return out;
}

// Posterior of `target` when every other variable is observed in `row`
// (indexed by node): only the Markov blanket matters.
inline std::vector<double> posterior_given_all(const DiscreteBayesNet& net, int target, std::vector<int> row) {
  const std::size_t r = net.cardinality(target);
  std::vector<double> out(r, 0.0);
  double z = 0;
  for (std::size_t k = 0; k < r; ++k) {
    row[static_cast<std::size_t>(target)] = static_cast<int>(k);
    const auto& c = net.cpt(target);
    double p = c.at(c.config_of(row), k);
    for (int ch : net.dag().children(target)) {
      const auto& cc = net.cpt(ch);
      p *= cc.at(cc.config_of(row), static_cast<std::size_t>(row[static_cast<std::size_t>(ch)]));
    }
    out[k] = p;
    z += p;
  }
  if (!(z > 0)) throw InferenceError("evidence has zero probability");
  for (auto& p : out) p /= z;
  return out;
}

struct Query {
  std::string target;
  std::string state;
  std::map<std::string, std::string> evidence;
  std::map<std::string, std::string> interventions;
};

// Mutilated network: every intervened node loses its parents and gets a
// point mass on the assigned state.
inline DiscreteBayesNet mutilate(const DiscreteBayesNet& net, const Assignment& interventions) {
  detail::check_assignment(net, interventions, "intervention");
  Dag g = net.dag();
  for (const auto& [v, s] : interventions)
    for (int p : std::vector<int>(g.parents(v))) g.remove_edge(p, v);
  std::vector<std::vector<double>> tables;
  for (int v = 0; v < static_cast<int>(net.size()); ++v) {
    if (auto it = interventions.find(v); it != interventions.end()) {
      std::vector<double> t(net.cardinality(v), 0.0);
      t[static_cast<std::size_t>(it->second)] = 1.0;
      tables.push_back(std::move(t));
    } else {
      tables.push_back(net.cpt(v).table);
    }
  }
  return DiscreteBayesNet(std::move(g), net.variables(), std::move(tables));
}

inline std::vector<double> interventional_posterior(const DiscreteBayesNet& net, int target, const Assignment& interventions,
                                                    const Assignment& evidence = {}) {
  for (const auto& [v, s] : evidence)
    if (interventions.count(v)) throw InferenceError("variable '" + net.variable(v).name + "' is both observed and intervened on");
  return posterior(mutilate(net, interventions), target, evidence);
}

namespace detail {

inline Assignment resolve(const DiscreteBayesNet& net, const std::map<std::string, std::string>& named) {
  Assignment a;
  for (const auto& [v, s] : named) {
    int i = net.index_of(v);
    a[i] = net.state_index(i, s);
  }
  return a;
}

}  // namespace detail

// P(target = state | evidence); interventions must be empty.
inline double infer(const DiscreteBayesNet& net, const Query& q) {
  if (!q.interventions.empty()) throw InferenceError("observational query with interventions; use intervene");
  int t = net.index_of(q.target);
  return posterior(net, t, detail::resolve(net, q.evidence))[static_cast<std::size_t>(net.state_index(t, q.state))];
}

// P(target = state | do(interventions), evidence).
inline double intervene(const DiscreteBayesNet& net, const Query& q) {
  int t = net.index_of(q.target);
  return interventional_posterior(net, t, detail::resolve(net, q.interventions), detail::resolve(net, q.evidence))
      [static_cast<std::size_t>(net.state_index(t, q.state))];
}

// Forward sampling in topological order.
inline CategoricalDataset sample(const DiscreteBayesNet& net, std::size_t n, std::uint64_t seed) {
  if (n < 1) throw InferenceError("sample size must be at least 1");
  Rng rng(seed);
  auto order = topological_order(net.dag());
  std::vector<std::vector<std::int32_t>> cols(net.size(), std::vector<std::int32_t>(n));
  std::vector<int> row(net.size(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (int v : order) {
      const auto& c = net.cpt(v);
      const std::size_t base = c.config_of(row) * c.cardinality;
      double u = rng.uniform(), acc = 0;
      std::size_t k = 0;
      for (; k + 1 < c.cardinality; ++k) {
        acc += c.table[base + k];
        if (u < acc) break;
      }
      // Skip trailing zero-probability states reached through rounding.
      while (k > 0 && c.table[base + k] == 0) --k;
      row[static_cast<std::size_t>(v)] = static_cast<int>(k);
      cols[static_cast<std::size_t>(v)][i] = static_cast<std::int32_t>(k);
    }
  }
  return CategoricalDataset(net.variables(), std::move(cols));
}

// Causal effect of switching a binary exposure from 1 to 0 on P(target=1).
struct EffectReport {
  std::string exposure;
  std::string target;
  double p1 = 0;  // P(target=1 | do(exposure=1))
  double p0 = 0;  // P(target=1 | do(exposure=0))
  double absolute = 0;                // p1 - p0
  std::optional<double> relative;     // (p1 - p0) / p1, undefined at p1 = 0
  std::string summary;
};

namespace detail {

// Index of the state standing for "1" / "yes" in a binary variable.
inline int positive_state(const Variable& v) {
  if (v.cardinality() != 2) throw InferenceError("variable '" + v.name + "' is not binary");
  for (const char* label : {"1", "yes", "Yes", "true", "True", "Y"})
    if (int s = v.state_index(label); s >= 0) return s;
  return 1;
}

inline std::string percent(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f%%", digits, 100.0 * x);
  return buf;
}

}  // namespace detail

inline EffectReport effect_report(const DiscreteBayesNet& net, const std::string& exposure, const std::string& target,
                                  int digits = 1) {
  int x = net.index_of(exposure), y = net.index_of(target);
  if (x == y) throw InferenceError("exposure and target must differ");
  const int x1 = detail::positive_state(net.variable(x));
  const int y1 = detail::positive_state(net.variable(y));
  EffectReport rep;
  rep.exposure = exposure;
  rep.target = target;
  rep.p1 = interventional_posterior(net, y, {{x, x1}})[static_cast<std::size_t>(y1)];
  rep.p0 = interventional_posterior(net, y, {{x, 1 - x1}})[static_cast<std::size_t>(y1)];
  rep.absolute = rep.p1 - rep.p0;
  if (rep.p1 > 0) rep.relative = rep.absolute / rep.p1;
  const char* dir = rep.absolute > 0 ? "decrease" : rep.absolute < 0 ? "increase" : "change";
  rep.summary = "removing " + exposure + " moves P(" + target + ") from " + detail::percent(rep.p1, digits) + " to " +
                detail::percent(rep.p0, digits) + ": " + dir + " of " + detail::percent(std::abs(rep.absolute), digits);
  if (rep.relative)
    rep.summary += " (" + detail::percent(std::abs(*rep.relative), digits) + " relative " + dir + ")";
  else
    rep.summary += " (relative change undefined)";
  return rep;
}

inline nlohmann::json to_json(const EffectReport& r) {
  return {{"exposure", r.exposure},
          {"target", r.target},
          {"p_do_1", r.p1},
          {"p_do_0", r.p0},
          {"absolute_change", r.absolute},
          {"relative_change", r.relative ? nlohmann::json(*r.relative) : nlohmann::json(nullptr)},
          {"summary", r.summary}};
}

inline nlohmann::json to_json(const DiscreteBayesNet& net) {
  nlohmann::json nodes = nlohmann::json::array();
  for (int i = 0; i < static_cast<int>(net.size()); ++i) {
    const auto& v = net.variable(i);
    const auto& c = net.cpt(i);
    std::vector<std::string> parents;
    for (int p : c.parents) parents.push_back(net.dag().name(p));
    nlohmann::json jn{{"name", v.name}, {"states", v.states}, {"parents", parents}, {"cpt", c.table}};
    if (!v.bins.empty()) jn["bins"] = v.bins;
    nodes.push_back(std::move(jn));
  }
  return {{"nodes", nodes}};
}

// Reads the format written by to_json; parents may be listed in any order
// and tables are permuted into graph order.
inline DiscreteBayesNet bayesnet_from_json(const nlohmann::json& j) {
  try {
    std::vector<std::string> names;
    std::vector<Variable> vars;
    for (const auto& n : j.at("nodes")) {
      Variable v;
      v.name = n.at("name").get<std::string>();
      v.states = n.at("states").get<std::vector<std::string>>();
      v.bins = n.value("bins", std::vector<double>{});
      names.push_back(v.name);
      vars.push_back(std::move(v));
    }
    Dag g(names);
    const auto& jn = j.at("nodes");
    for (std::size_t i = 0; i < jn.size(); ++i)
      for (const auto& p : jn[i].at("parents")) g.add_edge(p.get<std::string>(), names[i]);
    std::vector<std::vector<double>> tables;
    for (std::size_t i = 0; i < jn.size(); ++i) {
      auto listed = jn[i].at("parents").get<std::vector<std::string>>();
      auto raw = jn[i].at("cpt").get<std::vector<double>>();
      std::vector<int> lp;
      for (const auto& p : listed) lp.push_back(g.index_of(p));
      const auto& gp = g.parents(static_cast<int>(i));
      const std::size_t r = vars[i].cardinality();
      if (lp == gp) {
        tables.push_back(std::move(raw));
        continue;
      }
      // Re-index rows from listed parent order to graph parent order.
      std::size_t rows = 1;
      for (int p : gp) rows *= vars[static_cast<std::size_t>(p)].cardinality();
      if (raw.size() != rows * r) throw InferenceError("table of '" + names[i] + "' has the wrong size");
      std::vector<double> t(raw.size());
      std::vector<std::size_t> digit(gp.size());
      for (std::size_t row = 0; row < rows; ++row) {
        std::size_t rem = row;
        std::map<int, std::size_t> value;
        for (std::size_t k = gp.size(); k-- > 0;) {
          auto c = vars[static_cast<std::size_t>(gp[k])].cardinality();
          value[gp[k]] = rem % c;
          rem /= c;
        }
        std::size_t src = 0;
        for (int p : lp) src = src * vars[static_cast<std::size_t>(p)].cardinality() + value[p];
        for (std::size_t s = 0; s < r; ++s) t[row * r + s] = raw[src * r + s];
      }
      tables.push_back(std::move(t));
    }
    return DiscreteBayesNet(std::move(g), std::move(vars), std::move(tables));
  } catch (const nlohmann::json::exception& ex) {
    throw InferenceError(std::string("malformed network JSON: ") + ex.what());
  } catch (const GraphError& ex) {
    throw InferenceError(std::string("malformed network JSON: ") + ex.what());
  }
}

}  // namespace causalbn
