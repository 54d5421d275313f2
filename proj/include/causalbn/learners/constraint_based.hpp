#pragma once

// PC-Stable and Inter-IAMB: skeleton discovery by G² tests, then
// v-structures, Meek closure and a consistent extension.

#include <map>
#include <set>
#include <utility>
#include <vector>

#include "causalbn/learners/common.hpp"

namespace causalbn {

namespace detail {

using Sepsets = std::map<std::pair<int, int>, std::vector<int>>;

inline std::pair<int, int> pair_key(int a, int b) { return a < b ? std::pair{a, b} : std::pair{b, a}; }

inline std::string format_test(const std::vector<std::string>& names, int x, int y, const std::vector<int>& z,
                               const CiTestResult& r) {
  std::string s = names[static_cast<std::size_t>(x)] + " _||_ " + names[static_cast<std::size_t>(y)];
  if (!z.empty()) {
    s += " |";
    for (int v : z) s += " " + names[static_cast<std::size_t>(v)];
  }
  char buf[96];
  std::snprintf(buf, sizeof buf, " : G2=%.4f df=%g p=%.4g", r.statistic, r.dof, r.p_value);
  return s + buf + (r.independent ? " independent" : " dependent");
}

// Orients a skeleton: required edges fixed, single forbidden orientations
// forced, v-structures from separating sets (first found wins), then Meek.
inline Pdag orient_skeleton(Pdag p, const Sepsets& sepsets, const ConstraintMask& mask, std::vector<std::string>& trace) {
  const int n = static_cast<int>(p.size());
  auto order = p.lexicographic_order();
  auto rank = detail::name_ranks(p.nodes());
  for (const auto& e : mask.required_edges()) {
    if (!p.adjacent(e.from, e.to)) p.add_directed(e.from, e.to);
    p.orient(e.from, e.to);
  }
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (a != b && p.undirected(a, b) && mask.forbidden(a, b) && !mask.forbidden(b, a)) p.orient(b, a);

  auto closes_cycle = [&](int a, int b) {
    Dag d(p.nodes());
    for (const auto& e : p.directed_edges()) d.try_add_edge(e.from, e.to);
    return d.reachable(b, a);
  };
  auto direct = [&](int x, int z) {
    if (p.directed(x, z)) return true;
    if (p.directed(z, x)) return false;
    if (mask.forbidden(x, z) || closes_cycle(x, z)) return false;
    p.orient(x, z);
    return true;
  };
  for (int z : order) {
    auto adj = p.adjacents(z);
    sort_by_name(adj, rank);
    for (std::size_t i = 0; i < adj.size(); ++i)
      for (std::size_t j = i + 1; j < adj.size(); ++j) {
        int x = adj[i], y = adj[j];
        if (p.adjacent(x, y)) continue;
        auto it = sepsets.find(pair_key(x, y));
        if (it == sepsets.end()) continue;
        if (std::find(it->second.begin(), it->second.end(), z) != it->second.end()) continue;
        bool ok_x = direct(x, z);
        bool ok_y = direct(y, z);
        std::string v = p.name(x) + " -> " + p.name(z) + " <- " + p.name(y);
        trace.push_back(ok_x && ok_y ? "v-structure " + v : "conflict " + v + " (kept earlier orientation)");
      }
  }
  std::size_t k = apply_meek_rules(p, mask.predicate());
  if (k) trace.push_back("meek oriented " + std::to_string(k) + " edges");
  return p;
}

inline void extend(LearnResult& r, const ConstraintMask& mask) {
  auto ext = consistent_extension(r.graph, mask.predicate());
  r.dag = std::move(ext.dag);
  r.forced_extension = ext.forced;
  if (ext.forced) r.trace.push_back("no consistent extension; orientation forced");
}

inline std::size_t limit(const LearnerConfig& cfg, std::size_t available) {
  return cfg.max_conditioning_size ? std::min(*cfg.max_conditioning_size, available) : available;
}

}  // namespace detail

inline LearnResult learn_pc_stable(const CategoricalDataset& d, const LearnerConfig& cfg, const KnowledgeConstraints& k,
                                   std::shared_ptr<LocalScoreCache> cache = nullptr) {
  cfg.validate();
  auto mask = detail::make_mask(d, k);
  const auto& names = d.names();
  const int n = static_cast<int>(names.size());
  auto rank = detail::name_ranks(names);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(rank[static_cast<std::size_t>(i)])] = i;

  LearnResult r;
  r.algorithm = Algorithm::kPcStable;
  CiTester tester(d, cfg.alpha);
  Pdag p(names);
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b)
      if (!mask.pair_forbidden(a, b)) p.add_undirected(a, b);
  detail::Sepsets sepsets;

  for (std::size_t level = 0;; ++level) {
    if (cfg.max_conditioning_size && level > *cfg.max_conditioning_size) break;
    std::vector<std::vector<int>> frozen(static_cast<std::size_t>(n));
    for (int x = 0; x < n; ++x) {
      frozen[static_cast<std::size_t>(x)] = p.adjacents(x);
      detail::sort_by_name(frozen[static_cast<std::size_t>(x)], rank);
    }
    bool testable = false;
    for (int x : order)
      for (int y : frozen[static_cast<std::size_t>(x)]) {
        if (!p.adjacent(x, y) || mask.pair_required(x, y)) continue;
        std::vector<int> cand;
        for (int v : frozen[static_cast<std::size_t>(x)])
          if (v != y) cand.push_back(v);
        if (cand.size() < level) continue;
        testable = true;
        detail::for_each_subset(cand, level, [&](const std::vector<int>& s) {
          const auto& t = tester.test(x, y, s);
          r.trace.push_back(detail::format_test(names, x, y, s, t));
          if (!t.independent) return false;
          p.remove(x, y);
          sepsets[detail::pair_key(x, y)] = s;
          return true;
        });
      }
    ++r.stats.iterations;
    if (!testable) break;
  }

  r.graph = detail::orient_skeleton(p, sepsets, mask, r.trace);
  detail::extend(r, mask);
  r.stats.tests = tester.tests();
  BicScorer scorer(d, std::move(cache));
  detail::finish(r, mask, scorer);
  r.stats.score_evaluations = scorer.evaluations();
  return r;
}

// Interleaved incremental association Markov blanket of `target`.
inline std::vector<int> markov_blanket(CiTester& tester, const CategoricalDataset& d, int target,
                                       std::vector<std::string>* trace = nullptr) {
  const auto& names = d.names();
  const int n = static_cast<int>(names.size());
  auto rank = detail::name_ranks(names);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(rank[static_cast<std::size_t>(i)])] = i;

  std::vector<int> mb;
  std::set<int> dropped;  // removed once; not re-admitted, which guarantees termination
  auto log = [&](int x, const std::vector<int>& z, const CiTestResult& t) {
    if (trace) trace->push_back(detail::format_test(names, target, x, z, t));
  };
  while (true) {
    bool changed = false;
    std::optional<std::pair<int, CiTestResult>> best;
    for (int x : order) {
      if (x == target || dropped.count(x) || std::find(mb.begin(), mb.end(), x) != mb.end()) continue;
      const auto& t = tester.test(target, x, mb);
      log(x, mb, t);
      if (t.independent) continue;
      if (!best || stronger_association(t, best->second)) best = {x, t};
    }
    if (best) {
      mb.push_back(best->first);
      changed = true;
    }
    for (std::size_t i = 0; i < mb.size();) {
      std::vector<int> rest;
      for (std::size_t j = 0; j < mb.size(); ++j)
        if (j != i) rest.push_back(mb[j]);
      const auto& t = tester.test(target, mb[i], rest);
      log(mb[i], rest, t);
      if (t.independent) {
        dropped.insert(mb[i]);
        mb.erase(mb.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
      } else {
        ++i;
      }
    }
    if (!changed) break;
  }
  detail::sort_by_name(mb, rank);
  return mb;
}

namespace detail {

inline std::vector<std::vector<int>> symmetric_blankets(std::vector<std::vector<int>> mb, bool by_union) {
  const auto n = mb.size();
  std::vector<std::vector<char>> in(n, std::vector<char>(n, 0));
  for (std::size_t t = 0; t < n; ++t)
    for (int x : mb[t]) in[t][static_cast<std::size_t>(x)] = 1;
  std::vector<std::vector<int>> out(n);
  for (std::size_t t = 0; t < n; ++t)
    for (std::size_t x = 0; x < n; ++x) {
      bool a = in[t][x], b = in[x][t];
      if (by_union ? (a || b) : (a && b)) out[t].push_back(static_cast<int>(x));
    }
  return out;
}

}  // namespace detail

inline LearnResult learn_inter_iamb(const CategoricalDataset& d, const LearnerConfig& cfg, const KnowledgeConstraints& k,
                                    std::shared_ptr<LocalScoreCache> cache = nullptr) {
  cfg.validate();
  auto mask = detail::make_mask(d, k);
  const auto& names = d.names();
  const int n = static_cast<int>(names.size());
  auto rank = detail::name_ranks(names);

  LearnResult r;
  r.algorithm = Algorithm::kInterIamb;
  CiTester tester(d, cfg.alpha);
  std::vector<std::vector<int>> mb(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) mb[static_cast<std::size_t>(t)] = markov_blanket(tester, d, t, &r.trace);
  mb = detail::symmetric_blankets(std::move(mb), false);
  for (int t = 0; t < n; ++t) {
    detail::sort_by_name(mb[static_cast<std::size_t>(t)], rank);
    r.candidates[names[static_cast<std::size_t>(t)]] = detail::names_of(mb[static_cast<std::size_t>(t)], names);
  }

  // Neighbours: blanket members not separable by a subset of the smaller
  // remaining blanket.
  Pdag p(names);
  detail::Sepsets sepsets;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (mask.pair_required(a, b)) {
        p.add_undirected(a, b);
        continue;
      }
      const auto& ma = mb[static_cast<std::size_t>(a)];
      const auto& mbb = mb[static_cast<std::size_t>(b)];
      std::vector<int> both = ma;
      both.insert(both.end(), mbb.begin(), mbb.end());
      std::sort(both.begin(), both.end());
      both.erase(std::unique(both.begin(), both.end()), both.end());
      if (mask.pair_forbidden(a, b) || std::find(ma.begin(), ma.end(), b) == ma.end()) {
        sepsets[{a, b}] = both;  // separated by a blanket, which holds every common neighbour
        continue;
      }
      std::vector<int> ra, rb;
      for (int v : ma)
        if (v != b) ra.push_back(v);
      for (int v : mbb)
        if (v != a) rb.push_back(v);
      const auto& pool = ra.size() <= rb.size() ? ra : rb;
      bool separated = false;
      for (std::size_t level = 0; level <= detail::limit(cfg, pool.size()) && !separated; ++level)
        separated = detail::for_each_subset(pool, level, [&](const std::vector<int>& s) {
          const auto& t = tester.test(a, b, s);
          r.trace.push_back(detail::format_test(names, a, b, s, t));
          if (!t.independent) return false;
          sepsets[{a, b}] = s;
          return true;
        });
      if (!separated) p.add_undirected(a, b);
    }
  r.stats.iterations = static_cast<std::size_t>(n);

  r.graph = detail::orient_skeleton(p, sepsets, mask, r.trace);
  detail::extend(r, mask);
  r.stats.tests = tester.tests();
  BicScorer scorer(d, std::move(cache));
  detail::finish(r, mask, scorer);
  r.stats.score_evaluations = scorer.evaluations();
  return r;
}

}  // namespace causalbn
