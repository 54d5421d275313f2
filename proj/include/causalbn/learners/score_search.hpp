#pragma once

// Greedy and tabu search over add / delete / reverse moves with BIC.

#include <cmath>
#include <deque>
#include <optional>
#include <vector>

#include "causalbn/learners/common.hpp"
#include "causalbn/random.hpp"

namespace causalbn {

namespace detail {

class ScoreSearch {
 public:
  // `candidates`, when given, is an n*n symmetric table of pairs that may
  // gain an edge; required edges are always present from the start.
  ScoreSearch(const BicScorer& scorer, const ConstraintMask& mask, const std::vector<std::uint8_t>* candidates = nullptr)
      : scorer_(scorer), mask_(mask), candidates_(candidates), names_(scorer.data().names()), n_(static_cast<int>(names_.size())) {
    auto rank = detail::name_ranks(names_);
    order_.resize(names_.size());
    for (int i = 0; i < n_; ++i) order_[static_cast<std::size_t>(rank[static_cast<std::size_t>(i)])] = i;
  }

  Dag start() const {
    Dag g(names_);
    for (const auto& e : mask_.required_edges()) g.add_edge(e.from, e.to);
    return g;
  }

  double score(const Dag& g) const { return scorer_.score_indexed(g); }

  static double tolerance(double score) { return 1e-10 * std::max(1.0, std::abs(score)); }

  // Best legal move not rejected by `blocked`; ties keep the first move in
  // (type, from name, to name) order.
  template <typename Blocked>
  std::optional<ScoredMove> best_move(const Dag& g, double current, Blocked&& blocked) const {
    auto reach = reachability(g);
    std::optional<ScoredMove> best;
    const double eps = tolerance(current);
    auto consider = [&](Move m, double delta) {
      if (blocked(m)) return;
      if (!best || delta > best->delta + eps) best = ScoredMove{m, delta, current + delta};
    };
    for (Move::Type type : {Move::kAdd, Move::kDelete, Move::kReverse})
      for (int a : order_)
        for (int b : order_) {
          if (a == b) continue;
          Move m{type, a, b};
          if (!legal(g, m, reach)) continue;
          consider(m, delta(g, m));
        }
    return best;
  }

  std::optional<ScoredMove> best_move(const Dag& g, double current) const {
    return best_move(g, current, [](const Move&) { return false; });
  }

  bool legal(const Dag& g, const Move& m, const std::vector<std::uint8_t>& reach) const {
    const int a = m.from, b = m.to;
    auto reaches = [&](int x, int y) { return reach[static_cast<std::size_t>(x) * names_.size() + static_cast<std::size_t>(y)] != 0; };
    switch (m.type) {
      case Move::kAdd:
        if (g.adjacent(a, b) || mask_.forbidden(a, b)) return false;
        if (candidates_ && !(*candidates_)[static_cast<std::size_t>(a) * names_.size() + static_cast<std::size_t>(b)]) return false;
        return !reaches(b, a);
      case Move::kDelete:
        return g.has_edge(a, b) && !mask_.required(a, b);
      case Move::kReverse:
        if (!g.has_edge(a, b) || mask_.required(a, b) || mask_.forbidden(b, a)) return false;
        return !path_avoiding_edge(g, a, b);
    }
    return false;
  }

  double delta(const Dag& g, const Move& m) const {
    const int a = m.from, b = m.to;
    std::vector<int> pb = g.parents(b);
    const double base_b = scorer_.local(b, pb);
    switch (m.type) {
      case Move::kAdd: {
        pb.push_back(a);
        return scorer_.local(b, pb) - base_b;
      }
      case Move::kDelete: {
        std::erase(pb, a);
        return scorer_.local(b, pb) - base_b;
      }
      case Move::kReverse: {
        std::erase(pb, a);
        std::vector<int> pa = g.parents(a);
        const double base_a = scorer_.local(a, pa);
        pa.push_back(b);
        return scorer_.local(b, pb) - base_b + scorer_.local(a, pa) - base_a;
      }
    }
    return 0;
  }

  static void apply(Dag& g, const Move& m) {
    switch (m.type) {
      case Move::kAdd: g.add_edge(m.from, m.to); break;
      case Move::kDelete: g.remove_edge(m.from, m.to); break;
      case Move::kReverse: g.reverse_edge(m.from, m.to); break;
    }
  }

  std::vector<Move> legal_moves(const Dag& g) const {
    auto reach = reachability(g);
    std::vector<Move> out;
    for (Move::Type type : {Move::kAdd, Move::kDelete, Move::kReverse})
      for (int a : order_)
        for (int b : order_)
          if (a != b && legal(g, {type, a, b}, reach)) out.push_back({type, a, b});
    return out;
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  // reach[x*n+y] = 1 when a directed path x ~> y of length >= 1 exists.
  std::vector<std::uint8_t> reachability(const Dag& g) const {
    const auto n = names_.size();
    std::vector<std::uint8_t> r(n * n, 0);
    std::vector<int> stack;
    for (std::size_t s = 0; s < n; ++s) {
      stack.assign(g.children(static_cast<int>(s)).begin(), g.children(static_cast<int>(s)).end());
      while (!stack.empty()) {
        int v = stack.back();
        stack.pop_back();
        auto& cell = r[s * n + static_cast<std::size_t>(v)];
        if (cell) continue;
        cell = 1;
        for (int c : g.children(v)) stack.push_back(c);
      }
    }
    return r;
  }

  // Whether a directed path a ~> b exists without the edge a -> b itself.
  static bool path_avoiding_edge(const Dag& g, int a, int b) {
    std::vector<char> seen(g.size(), 0);
    std::vector<int> stack;
    for (int c : g.children(a))
      if (c != b) stack.push_back(c);
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      if (v == b) return true;
      if (seen[static_cast<std::size_t>(v)]) continue;
      seen[static_cast<std::size_t>(v)] = 1;
      for (int c : g.children(v)) stack.push_back(c);
    }
    return false;
  }

  const BicScorer& scorer_;
  const ConstraintMask& mask_;
  const std::vector<std::uint8_t>* candidates_;
  std::vector<std::string> names_;
  int n_;
  std::vector<int> order_;
};

struct SearchState {
  Dag graph;
  double score = 0;
};

inline bool out_of_iterations(const LearnerConfig& cfg, const LearnResult& r) {
  return cfg.max_iterations && r.stats.iterations >= *cfg.max_iterations;
}

inline void record(LearnResult& r, const ScoreSearch& s, const ScoredMove& m, const char* phase = nullptr) {
  r.moves.push_back(m);
  char buf[64];
  std::snprintf(buf, sizeof buf, " (%+.6f, score %.6f)", m.delta, m.score);
  r.trace.push_back((phase ? std::string(phase) + " " : std::string()) + describe(m.move, s.names()) + buf);
}

// Steepest ascent from `state` until no strictly improving move remains.
inline void climb(const ScoreSearch& s, SearchState& state, const LearnerConfig& cfg, LearnResult& r,
                  std::deque<Move>* tabu = nullptr) {
  while (!out_of_iterations(cfg, r)) {
    auto m = s.best_move(state.graph, state.score);
    if (!m || !(m->delta > ScoreSearch::tolerance(state.score))) break;
    ScoreSearch::apply(state.graph, m->move);
    state.score = m->score;
    ++r.stats.iterations;
    record(r, s, *m);
    if (tabu) {
      tabu->push_back(m->move);
      if (tabu->size() > cfg.tabu_list_length) tabu->pop_front();
    }
  }
}

// Hill climbing with optional random-perturbation restarts; keeps the best.
inline SearchState hill_climb(const ScoreSearch& s, const LearnerConfig& cfg, LearnResult& r) {
  SearchState state{s.start(), 0};
  state.score = s.score(state.graph);
  climb(s, state, cfg, r);
  SearchState best = state;
  Rng rng(cfg.seed);
  for (std::size_t restart = 0; restart < cfg.restarts && !out_of_iterations(cfg, r); ++restart) {
    SearchState cur = best;
    for (std::size_t k = 0; k < cfg.perturbation; ++k) {
      auto moves = s.legal_moves(cur.graph);
      if (moves.empty()) break;
      Move m = moves[rng.below(moves.size())];
      ScoreSearch::apply(cur.graph, m);
      r.trace.push_back("perturb " + describe(m, s.names()));
    }
    cur.score = s.score(cur.graph);
    climb(s, cur, cfg, r);
    if (cur.score > best.score + ScoreSearch::tolerance(best.score)) {
      best = cur;
      r.trace.push_back("restart " + std::to_string(restart + 1) + " improved best");
    }
  }
  return best;
}

// Hill climbing to a local optimum, then tabu moves (best non-tabu move,
// improving or not) until tabu_list_length steps pass without a new best.
inline SearchState tabu_search(const ScoreSearch& s, const LearnerConfig& cfg, LearnResult& r) {
  std::deque<Move> tabu;
  SearchState state{s.start(), 0};
  state.score = s.score(state.graph);
  climb(s, state, cfg, r, &tabu);
  SearchState best = state;
  std::size_t stale = 0;
  while (stale < cfg.tabu_list_length && !out_of_iterations(cfg, r)) {
    auto blocked = [&](const Move& m) {
      for (const auto& t : tabu)
        if (m == t.inverse()) return true;
      return false;
    };
    auto m = s.best_move(state.graph, state.score, blocked);
    if (!m) break;
    ScoreSearch::apply(state.graph, m->move);
    state.score = m->score;
    ++r.stats.iterations;
    record(r, s, *m, "tabu");
    tabu.push_back(m->move);
    if (tabu.size() > cfg.tabu_list_length) tabu.pop_front();
    if (state.score > best.score + ScoreSearch::tolerance(best.score)) {
      best = state;
      stale = 0;
    } else {
      ++stale;
    }
  }
  return best;
}

inline LearnResult run_score_search(Algorithm algo, const CategoricalDataset& d, const LearnerConfig& cfg,
                                    const ConstraintMask& mask, const std::vector<std::uint8_t>* candidates,
                                    std::shared_ptr<LocalScoreCache> cache, LearnResult r = {}) {
  BicScorer scorer(d, std::move(cache));
  ScoreSearch s(scorer, mask, candidates);
  r.algorithm = algo;
  auto best = algo == Algorithm::kTabu ? tabu_search(s, cfg, r) : hill_climb(s, cfg, r);
  // Accumulated deltas drift; report the exact score of the best graph.
  r.dag = best.graph;
  r.graph = Pdag::from_dag(r.dag);
  finish(r, mask, scorer);
  r.stats.score_evaluations += scorer.evaluations();
  return r;
}

}  // namespace detail

inline LearnResult learn_hc(const CategoricalDataset& d, const LearnerConfig& cfg, const KnowledgeConstraints& k,
                            std::shared_ptr<LocalScoreCache> cache = nullptr) {
  cfg.validate();
  auto mask = detail::make_mask(d, k);
  return detail::run_score_search(Algorithm::kHc, d, cfg, mask, nullptr, std::move(cache));
}

inline LearnResult learn_tabu(const CategoricalDataset& d, const LearnerConfig& cfg, const KnowledgeConstraints& k,
                              std::shared_ptr<LocalScoreCache> cache = nullptr) {
  cfg.validate();
  auto mask = detail::make_mask(d, k);
  return detail::run_score_search(Algorithm::kTabu, d, cfg, mask, nullptr, std::move(cache));
}

}  // namespace causalbn
