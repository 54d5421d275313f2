#pragma once

// Model averaging over several learned DAGs: edge frequencies, ranked
// assembly with cycle handling, and BIC selection of the frequency cut-off.

#include <algorithm>
#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalbn/dataset.hpp"
#include "causalbn/error.hpp"
#include "causalbn/graph.hpp"
#include "causalbn/knowledge.hpp"
#include "causalbn/scoring.hpp"

namespace causalbn {

// Counts for the unordered pair {a, b} with a < b by name.
struct PairCounts {
  std::size_t forward = 0;     // a -> b
  std::size_t backward = 0;    // b -> a
  std::size_t undirected = 0;  // a - b (only from partially directed inputs)
  std::size_t total() const { return forward + backward + undirected; }
};

struct EdgeTally {
  std::vector<std::string> nodes;
  std::size_t k = 0;
  std::map<std::pair<std::string, std::string>, PairCounts> pairs;

  std::size_t count(const std::string& from, const std::string& to) const {
    if (from < to) {
      auto it = pairs.find({from, to});
      return it == pairs.end() ? 0 : it->second.forward;
    }
    auto it = pairs.find({to, from});
    return it == pairs.end() ? 0 : it->second.backward;
  }

  // Every oriented edge with a positive count.
  std::vector<std::pair<NamedEdge, std::size_t>> oriented() const {
    std::vector<std::pair<NamedEdge, std::size_t>> out;
    for (const auto& [p, c] : pairs) {
      if (c.forward) out.push_back({{p.first, p.second}, c.forward});
      if (c.backward) out.push_back({{p.second, p.first}, c.backward});
    }
    return out;
  }
};

namespace detail {

inline void require_same_nodes(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::set<std::string> sa(a.begin(), a.end()), sb(b.begin(), b.end());
  if (sa == sb) return;
  std::string diff;
  for (const auto& x : sa)
    if (!sb.count(x)) diff += (diff.empty() ? "" : ", ") + x;
  for (const auto& x : sb)
    if (!sa.count(x)) diff += (diff.empty() ? "" : ", ") + x;
  throw GraphError("structures have different node sets: " + diff);
}

}  // namespace detail

inline EdgeTally tally_edges(const std::vector<Dag>& structures) {
  if (structures.empty()) throw GraphError("cannot tally zero structures");
  EdgeTally t;
  t.nodes = structures.front().nodes();
  t.k = structures.size();
  for (const auto& g : structures) {
    detail::require_same_nodes(t.nodes, g.nodes());
    for (const auto& [from, to] : g.named_edges()) {
      auto& c = t.pairs[from < to ? std::pair{from, to} : std::pair{to, from}];
      (from < to ? c.forward : c.backward) += 1;
    }
  }
  return t;
}

// Partially directed inputs: undirected edges are counted separately and
// never assembled.
inline EdgeTally tally_edges(const std::vector<Pdag>& structures) {
  if (structures.empty()) throw GraphError("cannot tally zero structures");
  EdgeTally t;
  t.nodes = structures.front().nodes();
  t.k = structures.size();
  for (const auto& g : structures) {
    detail::require_same_nodes(t.nodes, g.nodes());
    for (const auto& e : g.directed_edges()) {
      const auto &from = g.name(e.from), &to = g.name(e.to);
      auto& c = t.pairs[from < to ? std::pair{from, to} : std::pair{to, from}];
      (from < to ? c.forward : c.backward) += 1;
    }
    for (const auto& e : g.undirected_edges()) {
      const auto &a = g.name(e.from), &b = g.name(e.to);
      t.pairs[a < b ? std::pair{a, b} : std::pair{b, a}].undirected += 1;
    }
  }
  return t;
}

struct AssemblyLog {
  std::vector<std::string> entries;
  std::vector<NamedEdge> reversed;  // added in the opposite orientation
  std::vector<NamedEdge> dropped;   // both orientations rejected
};

inline Dag assemble(const EdgeTally& t, std::size_t threshold, const KnowledgeConstraints& k,
                    AssemblyLog* log = nullptr) {
  if (threshold < 1 || threshold > t.k)
    throw Error("threshold L=" + std::to_string(threshold) + " outside 1.." + std::to_string(t.k));
  ConstraintMask mask(k, t.nodes);
  Dag g(t.nodes);
  AssemblyLog local;
  AssemblyLog& out = log ? *log : local;
  auto note = [&](std::string s) { out.entries.push_back(std::move(s)); };

  for (const auto& e : mask.required_edges()) {
    g.add_edge(e.from, e.to);
    note("required " + g.name(e.from) + " -> " + g.name(e.to));
  }

  auto ranked = t.oriented();
  std::erase_if(ranked, [&](const auto& x) { return x.second < threshold; });
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    if (a.second != b.second) return a.second > b.second;
    return a.first < b.first;
  });

  auto fits = [&](int f, int to) { return mask.allowed(f, to) && g.can_add_edge(f, to); };
  for (const auto& [edge, count] : ranked) {
    int a = g.index_of(edge.first), b = g.index_of(edge.second);
    if (g.adjacent(a, b)) continue;
    // Equal support for both orientations: preference, then acyclicity,
    // then the lexicographically first one (this one).
    if (t.count(edge.second, edge.first) == count) {
      bool flip = false;
      if (auto pref = k.preferred(edge.first, edge.second)) {
        flip = pref->first != edge.first;
      } else if (!fits(a, b) && fits(b, a)) {
        flip = true;
      }
      if (flip) std::swap(a, b);
      note("tie " + edge.first + " / " + edge.second + " resolved as " + g.name(a) + " -> " + g.name(b));
    }
    if (fits(a, b)) {
      g.add_edge(a, b);
      note("add " + g.name(a) + " -> " + g.name(b) + " (" + std::to_string(count) + ")");
    } else if (fits(b, a)) {
      g.add_edge(b, a);
      out.reversed.emplace_back(g.name(b), g.name(a));
      note("reverse " + g.name(a) + " -> " + g.name(b) + " to " + g.name(b) + " -> " + g.name(a));
    } else {
      out.dropped.emplace_back(g.name(a), g.name(b));
      note("drop " + g.name(a) + " -> " + g.name(b));
    }
  }
  return g;
}

struct AveragedFamily {
  std::map<std::size_t, Dag> graphs;
  std::map<std::size_t, double> bic;
  std::map<std::size_t, AssemblyLog> logs;
  std::size_t selected_l = 0;

  const Dag& selected() const { return graphs.at(selected_l); }
};

inline AveragedFamily average_family(const EdgeTally& t, const KnowledgeConstraints& k) {
  AveragedFamily f;
  for (std::size_t l = 1; l <= t.k; ++l) f.graphs.emplace(l, assemble(t, l, k, &f.logs[l]));
  return f;
}

// Scores every threshold 1..K; the best BIC wins, ties going to the larger L.
inline AveragedFamily select_by_bic(const EdgeTally& t, const CategoricalDataset& d, const KnowledgeConstraints& k) {
  d.require_complete("BIC scoring");
  auto f = average_family(t, k);
  LocalScoreCache cache;
  std::optional<double> best;
  for (const auto& [l, g] : f.graphs) {
    double s = 0;
    for (int i = 0; i < static_cast<int>(g.size()); ++i) {
      std::vector<std::string> pa;
      for (int p : g.parents(i)) pa.push_back(g.name(p));
      s += local_bic(g.name(i), pa, d, &cache);
    }
    f.bic[l] = s;
    if (!best || s >= *best) {
      best = s;
      f.selected_l = l;
    }
  }
  return f;
}

inline nlohmann::json to_json(const EdgeTally& t) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& [p, c] : t.pairs)
    edges.push_back({{"a", p.first}, {"b", p.second}, {"a_to_b", c.forward}, {"b_to_a", c.backward}, {"undirected", c.undirected}});
  return {{"nodes", t.nodes}, {"k", t.k}, {"pairs", edges}};
}

inline nlohmann::json to_json(const AssemblyLog& log) {
  nlohmann::json dropped = nlohmann::json::array(), reversed = nlohmann::json::array();
  for (const auto& [a, b] : log.dropped) dropped.push_back({{"from", a}, {"to", b}});
  for (const auto& [a, b] : log.reversed) reversed.push_back({{"from", a}, {"to", b}});
  return {{"steps", log.entries}, {"reversed", reversed}, {"dropped", dropped}};
}

inline nlohmann::json to_json(const AveragedFamily& f) {
  nlohmann::json members = nlohmann::json::array();
  for (const auto& [l, g] : f.graphs) {
    nlohmann::json m = {{"L", l}, {"graph", to_json(g)}, {"edges", g.edge_count()}, {"fragments", count_fragments(g)}};
    if (f.bic.count(l)) m["bic"] = f.bic.at(l);
    if (f.logs.count(l)) m["assembly"] = to_json(f.logs.at(l));
    members.push_back(std::move(m));
  }
  return {{"selected_L", f.selected_l}, {"members", members}};
}

}  // namespace causalbn
