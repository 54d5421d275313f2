#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
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

enum class Algorithm { kPcStable, kInterIamb, kHc, kTabu, kMmhc, kH2pc };

inline const std::vector<Algorithm>& all_algorithms() {
  static const std::vector<Algorithm> all{Algorithm::kPcStable, Algorithm::kInterIamb, Algorithm::kHc,
                                          Algorithm::kTabu,     Algorithm::kMmhc,      Algorithm::kH2pc};
  return all;
}

inline std::string to_string(Algorithm a) {
  switch (a) {
    case Algorithm::kPcStable: return "pc_stable";
    case Algorithm::kInterIamb: return "inter_iamb";
    case Algorithm::kHc: return "hc";
    case Algorithm::kTabu: return "tabu";
    case Algorithm::kMmhc: return "mmhc";
    case Algorithm::kH2pc: return "h2pc";
  }
  return "unknown";
}

inline Algorithm algorithm_from_string(std::string_view s) {
  for (auto a : all_algorithms())
    if (to_string(a) == s) return a;
  throw Error("unknown algorithm '" + std::string(s) + "'");
}

struct LearnerConfig {
  Algorithm algorithm = Algorithm::kHc;
  double alpha = 0.05;
  std::size_t tabu_list_length = 10;
  std::size_t restarts = 0;
  std::optional<std::size_t> max_iterations;         // unbounded when empty
  std::optional<std::size_t> max_conditioning_size;  // unbounded when empty
  std::size_t perturbation = 1;                       // random moves per restart
  std::uint64_t seed = 0;

  void validate() const {
    if (!(alpha > 0 && alpha < 1)) throw Error("alpha must lie in (0, 1)");
    if (tabu_list_length < 1) throw Error("tabu list length must be at least 1");
  }
};

// Reads the learner fields of a JSON object: alpha, tabu, restart, max_iter,
// max_sx (null or "Inf" means unbounded), plus perturb and seed.
inline LearnerConfig config_from_json(const nlohmann::json& j, LearnerConfig base = {}) {
  if (!j.is_object()) throw Error("learner configuration must be a JSON object");
  auto bound = [](const nlohmann::json& v, const char* key) -> std::optional<std::size_t> {
    if (v.is_null() || (v.is_string() && (v == "Inf" || v == "inf"))) return std::nullopt;
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw Error(std::string("'") + key + "' must be a non-negative integer or \"Inf\"");
    return v.get<std::size_t>();
  };
  auto count = [](const nlohmann::json& v, const char* key) {
    if (!v.is_number_integer() || v.get<long long>() < 0)
      throw Error(std::string("'") + key + "' must be a non-negative integer");
    return v.get<std::size_t>();
  };
  if (j.contains("algorithm")) base.algorithm = algorithm_from_string(j.at("algorithm").get<std::string>());
  if (j.contains("alpha")) {
    if (!j.at("alpha").is_number()) throw Error("'alpha' must be a number");
    base.alpha = j.at("alpha").get<double>();
  }
  if (j.contains("tabu")) base.tabu_list_length = count(j.at("tabu"), "tabu");
  if (j.contains("restart")) base.restarts = count(j.at("restart"), "restart");
  if (j.contains("perturb")) base.perturbation = count(j.at("perturb"), "perturb");
  if (j.contains("max_iter")) base.max_iterations = bound(j.at("max_iter"), "max_iter");
  if (j.contains("max_sx")) base.max_conditioning_size = bound(j.at("max_sx"), "max_sx");
  if (j.contains("seed")) base.seed = j.at("seed").get<std::uint64_t>();
  base.validate();
  return base;
}

inline nlohmann::json to_json(const LearnerConfig& c) {
  auto opt = [](const std::optional<std::size_t>& v) { return v ? nlohmann::json(*v) : nlohmann::json("Inf"); };
  return {{"algorithm", to_string(c.algorithm)},
          {"alpha", c.alpha},
          {"tabu", c.tabu_list_length},
          {"restart", c.restarts},
          {"perturb", c.perturbation},
          {"max_iter", opt(c.max_iterations)},
          {"max_sx", opt(c.max_conditioning_size)},
          {"seed", c.seed}};
}

struct Move {
  enum Type { kAdd = 0, kDelete = 1, kReverse = 2 };
  Type type = kAdd;
  int from = 0;
  int to = 0;

  Move inverse() const {
    switch (type) {
      case kAdd: return {kDelete, from, to};
      case kDelete: return {kAdd, from, to};
      case kReverse: return {kReverse, to, from};
    }
    return *this;
  }
  friend bool operator==(const Move&, const Move&) = default;
};

struct ScoredMove {
  Move move;
  double delta = 0;
  double score = 0;  // total score after the move
};

struct LearnStats {
  std::size_t tests = 0;
  std::size_t score_evaluations = 0;
  std::size_t iterations = 0;
};

struct LearnResult {
  Algorithm algorithm = Algorithm::kHc;
  Pdag graph;
  Dag dag;
  bool forced_extension = false;
  double score = 0;  // BIC of dag
  std::vector<std::string> trace;
  std::vector<ScoredMove> moves;                   // score-based phases only
  std::map<std::string, std::vector<std::string>> candidates;  // restrict phase / blankets
  LearnStats stats;
};

inline std::string describe(const Move& m, const std::vector<std::string>& names) {
  static const char* verb[] = {"add", "delete", "reverse"};
  return std::string(verb[m.type]) + " " + names[static_cast<std::size_t>(m.from)] + " -> " +
         names[static_cast<std::size_t>(m.to)];
}

inline nlohmann::json to_json(const LearnStats& s) {
  return {{"tests", s.tests}, {"score_evaluations", s.score_evaluations}, {"iterations", s.iterations}};
}

inline nlohmann::json to_json(const LearnResult& r) {
  nlohmann::json cand = nlohmann::json::object();
  for (const auto& [k, v] : r.candidates) cand[k] = v;
  return {{"algorithm", to_string(r.algorithm)},
          {"graph", to_json(r.graph)},
          {"dag", to_json(r.dag)},
          {"forced_extension", r.forced_extension},
          {"bic", r.score},
          {"stats", to_json(r.stats)},
          {"candidates", cand},
          {"trace", r.trace}};
}

namespace detail {

// Ensures the contract on the final DAG: required edges present, forbidden
// edges absent. Only the forced extension fallback can need repairs.
inline void enforce_constraints(Dag& g, const ConstraintMask& mask, std::vector<std::string>& trace) {
  for (const auto& e : g.edges())
    if (mask.forbidden(e.from, e.to)) {
      g.remove_edge(e.from, e.to);
      trace.push_back("drop forbidden " + g.name(e.from) + " -> " + g.name(e.to));
    }
  for (const auto& e : mask.required_edges()) {
    const int f = e.from, t = e.to;
    if (g.has_edge(f, t)) continue;
    if (g.has_edge(t, f)) g.remove_edge(t, f);
    if (!g.try_add_edge(f, t)) {
      // Remove non-required edges on a path t ~> f until the edge fits.
      for (const auto& e : g.edges())
        if (!mask.required(e.from, e.to) && g.reachable(t, e.from) && g.reachable(e.to, f)) g.remove_edge(e.from, e.to);
      if (!g.try_add_edge(f, t)) throw ConstraintError("required edges cannot be made acyclic");
    }
    trace.push_back("restore required " + g.name(f) + " -> " + g.name(t));
  }
}

inline void finish(LearnResult& r, const ConstraintMask& mask, const BicScorer& scorer) {
  enforce_constraints(r.dag, mask, r.trace);
  r.score = scorer.score_indexed(r.dag);
}

inline ConstraintMask make_mask(const CategoricalDataset& d, const KnowledgeConstraints& k) {
  return ConstraintMask(k, d.names());
}

// k-subsets of `items` in lexicographic position order.
template <typename F>
bool for_each_subset(const std::vector<int>& items, std::size_t k, F&& f) {
  if (k > items.size()) return false;
  std::vector<std::size_t> idx(k);
  for (std::size_t i = 0; i < k; ++i) idx[i] = i;
  std::vector<int> s(k);
  while (true) {
    for (std::size_t i = 0; i < k; ++i) s[i] = items[idx[i]];
    if (f(s)) return true;
    std::size_t i = k;
    while (i > 0 && idx[i - 1] == items.size() - k + i - 1) --i;
    if (i == 0) return false;
    ++idx[i - 1];
    for (std::size_t j = i; j < k; ++j) idx[j] = idx[j - 1] + 1;
  }
}

inline std::vector<std::string> names_of(const std::vector<int>& v, const std::vector<std::string>& names) {
  std::vector<std::string> out;
  for (int i : v) out.push_back(names[static_cast<std::size_t>(i)]);
  std::sort(out.begin(), out.end());
  return out;
}

inline void sort_by_name(std::vector<int>& v, const std::vector<int>& rank) {
  std::sort(v.begin(), v.end(), [&](int a, int b) { return rank[static_cast<std::size_t>(a)] < rank[static_cast<std::size_t>(b)]; });
}

}  // namespace detail

}  // namespace causalbn
