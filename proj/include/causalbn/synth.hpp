#pragma once

// Ground-truth generators: random discrete networks and a sepsis-shaped
// scenario with its knowledge constraints.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <map>
#include <numeric>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "causalbn/bayesnet.hpp"
#include "causalbn/graph.hpp"
#include "causalbn/knowledge.hpp"
#include "causalbn/random.hpp"

namespace causalbn {

namespace detail {

inline std::vector<double> dirichlet_row(Rng& rng, std::size_t r) {
  std::vector<double> row(r);
  double s = 0;
  for (auto& x : row) s += (x = rng.exponential());
  for (auto& x : row) x /= s;
  return row;
}

inline std::string padded_name(std::size_t i, std::size_t n) {
  std::string num = std::to_string(i + 1);
  std::string width = std::to_string(n);
  return "X" + std::string(width.size() - num.size(), '0') + num;
}

}  // namespace detail

// Random DAG over X1..Xn: nodes are placed in a random order and each picks
// up to max_parents earlier nodes; every table row is Dirichlet(1).
// `state_counts` holds one cardinality for all nodes, one per node, or a pool
// to draw from.
inline DiscreteBayesNet random_net(std::size_t node_count, std::size_t max_parents,
                                   const std::vector<std::size_t>& state_counts, std::uint64_t seed) {
  if (node_count < 1) throw Error("node_count must be at least 1");
  if (max_parents >= node_count) throw Error("max_parents must be below node_count");
  if (state_counts.empty()) throw Error("state_counts must not be empty");
  for (auto c : state_counts)
    if (c < 2) throw Error("every variable needs at least 2 states");
  Rng rng(seed);
  std::vector<std::string> names;
  for (std::size_t i = 0; i < node_count; ++i) names.push_back(detail::padded_name(i, node_count));
  std::vector<Variable> vars;
  for (std::size_t i = 0; i < node_count; ++i) {
    std::size_t card = state_counts.size() == 1            ? state_counts[0]
                       : state_counts.size() == node_count ? state_counts[i]
                                                           : state_counts[rng.below(state_counts.size())];
    Variable v;
    v.name = names[i];
    for (std::size_t s = 0; s < card; ++s) v.states.push_back(std::to_string(s));
    vars.push_back(std::move(v));
  }
  std::vector<int> order(node_count);
  std::iota(order.begin(), order.end(), 0);
  rng.shuffle(order);
  Dag g(names);
  for (std::size_t pos = 1; pos < node_count; ++pos) {
    const std::size_t k = rng.below(std::min(max_parents, pos) + 1);
    std::vector<int> earlier(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(pos));
    rng.shuffle(earlier);
    for (std::size_t j = 0; j < k; ++j) g.add_edge(earlier[j], order[pos]);
  }
  std::vector<std::vector<double>> tables;
  for (int i = 0; i < static_cast<int>(node_count); ++i) {
    std::size_t rows = 1;
    for (int p : g.parents(i)) rows *= vars[static_cast<std::size_t>(p)].cardinality();
    std::vector<double> t;
    for (std::size_t r = 0; r < rows; ++r) {
      auto row = detail::dirichlet_row(rng, vars[static_cast<std::size_t>(i)].cardinality());
      t.insert(t.end(), row.begin(), row.end());
    }
    tables.push_back(std::move(t));
  }
  return DiscreteBayesNet(std::move(g), std::move(vars), std::move(tables));
}

struct Scenario {
  DiscreteBayesNet net;
  KnowledgeConstraints constraints;
  std::string target;
  double prevalence = 0;  // exact P(target = positive)
};

inline std::vector<NamedEdge> sepsis_required_edges() {
  return {{"ISA", "ROS"},          {"ROS", "ERR"},        {"COPD", "ROS"},        {"Myelodysplastic", "WBC"},
          {"ID", "Sepsis"},        {"Cancer", "ID"},      {"Diabetes", "Glucose"}, {"COPD", "Number of Diagnoses"},
          {"Alcohol", "Albumin"},  {"Age", "Number of Diagnoses"}, {"Age", "Cancer"}, {"Hypotension", "Tachycardia"},
          {"VD", "CVL"},           {"PN", "CVL"},         {"Coma", "PN"},         {"Coma", "MV"},
          {"ES", "Number of Procedures"}, {"ES", "Coma"}, {"MV", "Sepsis"},      {"Antibiotics", "Sepsis"},
          {"CVL", "Sepsis"}};
}

inline KnowledgeConstraints sepsis_constraints() {
  KnowledgeConstraints k;
  k.required = sepsis_required_edges();
  k.tiers.push_back({1, {"Age", "Gender", "Ethnic Group"}, false});
  return k;
}

// Variables of the scenario: banded age, sex, ethnic group, two binned
// counts, and binary indicators "0"/"1".
inline std::vector<Variable> sepsis_variables() {
  std::vector<Variable> v;
  v.push_back({"Age", {"<40", "40-59", "60-79", "80+"}, {40, 60, 80}});
  v.push_back({"Gender", {"F", "M"}, {}});
  v.push_back({"Ethnic Group", {"A", "B", "H", "M", "Z"}, {}});
  v.push_back({"Number of Diagnoses", {"0-4", "5-9", "10+"}, {5, 10}});
  v.push_back({"Number of Procedures", {"0", "1-2", "3+"}, {1, 3}});
  for (const char* name : {"WBC", "Glucose", "UC", "CVL", "MV", "FR", "VD", "ES", "PN", "Albumin", "AS", "Coma",
                           "COPD", "ID", "Alcohol", "ERR", "Hypotension", "ISA", "Trauma", "ROS", "Tachycardia",
                           "Antibiotics", "ELL", "Myelodysplastic", "Cystic Fibrosis", "Diabetes", "Cancer", "Anuria",
                           "CKD Stage 3+", "IA", "Sepsis"})
    v.push_back({name, {"0", "1"}, {}});
  return v;
}

namespace detail {

inline double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

// Ordinal-shift table: log P(k | pa) = base_k + k * sum_p w_p * level_p,
// normalised, where level_p in [0, 1] is the parent's state rank.
inline std::vector<double> shift_table(const std::vector<double>& base, const std::vector<double>& weights,
                                       const std::vector<std::size_t>& parent_cards) {
  std::size_t rows = 1;
  for (auto c : parent_cards) rows *= c;
  const std::size_t r = base.size();
  std::vector<double> t(rows * r);
  for (std::size_t row = 0; row < rows; ++row) {
    std::size_t rem = row;
    double s = 0;
    for (std::size_t j = parent_cards.size(); j-- > 0;) {
      const std::size_t val = rem % parent_cards[j];
      rem /= parent_cards[j];
      s += weights[j] * static_cast<double>(val) / static_cast<double>(parent_cards[j] - 1);
    }
    double z = 0;
    for (std::size_t k = 0; k < r; ++k) z += (t[row * r + k] = std::exp(base[k] + static_cast<double>(k) * s));
    for (std::size_t k = 0; k < r; ++k) t[row * r + k] /= z;
  }
  return t;
}

}  // namespace detail

// Sepsis-shaped ground truth: the required edges plus IA -> Sepsis and
// random filler edges (about 1.5 edges per node overall) that respect the
// tiers and keep the graph connected. Sepsis is a sink whose intercept is
// bisected so that P(Sepsis = 1) equals `prevalence`.
inline Scenario sepsis_scenario(std::uint64_t seed, double prevalence = 0.0356, double edges_per_node = 1.5) {
  Rng rng(seed);
  auto vars = sepsis_variables();
  std::vector<std::string> names;
  for (const auto& v : vars) names.push_back(v.name);
  auto k = sepsis_constraints();
  Dag g(names);
  for (const auto& [a, b] : k.required) g.add_edge(a, b);
  g.add_edge("IA", "Sepsis");
  const int sepsis = g.index_of("Sepsis");
  std::set<int> tier1{g.index_of("Age"), g.index_of("Gender"), g.index_of("Ethnic Group")};
  const std::size_t max_parents = 3;

  auto can_link = [&](int a, int b) {
    return a != b && !tier1.count(b) && a != sepsis && b != sepsis && !g.adjacent(a, b) &&
           g.parents(b).size() < max_parents && g.can_add_edge(a, b);
  };
  const auto n = names.size();
  const auto target_edges = static_cast<std::size_t>(std::llround(edges_per_node * static_cast<double>(n)));
  for (std::size_t attempts = 0; g.edge_count() < target_edges && attempts < 100000; ++attempts) {
    int a = static_cast<int>(rng.below(n)), b = static_cast<int>(rng.below(n));
    if (can_link(a, b)) g.add_edge(a, b);
  }
  // Join fragments into the component holding Sepsis.
  while (true) {
    std::vector<int> comp(n, -1);
    int count = 0;
    for (int s = 0; s < static_cast<int>(n); ++s) {
      if (comp[static_cast<std::size_t>(s)] >= 0) continue;
      std::vector<int> stack{s};
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        if (comp[static_cast<std::size_t>(v)] >= 0) continue;
        comp[static_cast<std::size_t>(v)] = count;
        for (int p : g.parents(v)) stack.push_back(p);
        for (int c : g.children(v)) stack.push_back(c);
      }
      ++count;
    }
    if (count == 1) break;
    const int main = comp[static_cast<std::size_t>(sepsis)];
    bool linked = false;
    for (int a = 0; a < static_cast<int>(n) && !linked; ++a) {
      if (comp[static_cast<std::size_t>(a)] == main) continue;
      std::vector<int> pool;
      for (int b = 0; b < static_cast<int>(n); ++b)
        if (comp[static_cast<std::size_t>(b)] == main) pool.push_back(b);
      rng.shuffle(pool);
      for (int b : pool) {
        if (can_link(a, b)) {
          g.add_edge(a, b);
          linked = true;
          break;
        }
        if (can_link(b, a)) {
          g.add_edge(b, a);
          linked = true;
          break;
        }
      }
    }
    if (!linked) throw Error("could not connect the scenario graph");
  }

  // Tables: roots get fixed-shape marginals, children an ordinal shift with
  // clearly detectable parent effects.
  std::vector<std::vector<double>> tables(n);
  std::vector<double> sepsis_weights;
  for (int i = 0; i < static_cast<int>(n); ++i) {
    const auto r = vars[static_cast<std::size_t>(i)].cardinality();
    std::vector<std::size_t> cards;
    for (int p : g.parents(i)) cards.push_back(vars[static_cast<std::size_t>(p)].cardinality());
    std::vector<double> weights;
    for (std::size_t j = 0; j < cards.size(); ++j) {
      double w = 1.0 + 1.2 * rng.uniform();
      weights.push_back(i == sepsis ? w : (rng.uniform() < 0.25 ? -w : w));
    }
    std::vector<double> base(r);
    if (r == 2) {
      // Indicator base rate between 5% and 35% before parent effects.
      base[0] = 0;
      base[1] = std::log(0.05 + 0.3 * rng.uniform()) - std::log(0.65);
    } else {
      for (auto& b : base) b = std::log(0.5 + rng.uniform());
    }
    if (i == sepsis) sepsis_weights = weights;
    tables[static_cast<std::size_t>(i)] = detail::shift_table(base, weights, cards);
  }

  auto build = [&](double intercept) {
    std::vector<std::size_t> cards;
    for (int p : g.parents(sepsis)) cards.push_back(vars[static_cast<std::size_t>(p)].cardinality());
    auto t = tables;
    t[static_cast<std::size_t>(sepsis)] = detail::shift_table({0.0, intercept}, sepsis_weights, cards);
    return DiscreteBayesNet(g, vars, std::move(t));
  };
  double lo = -30, hi = 10;
  for (int it = 0; it < 200 && hi - lo > 1e-13; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double p = posterior(build(mid), sepsis)[1];
    (p < prevalence ? lo : hi) = mid;
  }
  Scenario s{build(0.5 * (lo + hi)), k, "Sepsis", 0};
  s.prevalence = posterior(s.net, sepsis)[1];
  return s;
}

}  // namespace causalbn
