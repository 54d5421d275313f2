#pragma once

// MMHC and H2PC: a constraint-based restrict phase builds candidate
// neighbour sets, then hill climbing searches inside them.

#include <map>
#include <optional>
#include <vector>

#include "causalbn/learners/constraint_based.hpp"
#include "causalbn/learners/score_search.hpp"

namespace causalbn {

// Max-min parents and children of `target`.
inline std::vector<int> mmpc(CiTester& tester, const CategoricalDataset& d, int target, const LearnerConfig& cfg) {
  const auto& names = d.names();
  const int n = static_cast<int>(names.size());
  auto rank = detail::name_ranks(names);
  std::vector<int> order(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) order[static_cast<std::size_t>(rank[static_cast<std::size_t>(i)])] = i;

  std::vector<int> cpc;
  std::map<int, CiTestResult> min_assoc;  // weakest association seen per live candidate
  for (int x : order)
    if (x != target) min_assoc[x] = tester.test(target, x, {});

  auto weaker = [](const CiTestResult& a, const CiTestResult& b) { return stronger_association(b, a); };
  while (true) {
    for (auto it = min_assoc.begin(); it != min_assoc.end();)
      it = it->second.independent ? min_assoc.erase(it) : std::next(it);
    std::optional<int> pick;
    for (int x : order) {
      auto it = min_assoc.find(x);
      if (it == min_assoc.end()) continue;
      if (!pick || stronger_association(it->second, min_assoc.at(*pick))) pick = x;
    }
    if (!pick) break;
    const int added = *pick;
    cpc.push_back(added);
    min_assoc.erase(added);
    // Only subsets containing the new member can lower a minimum.
    std::vector<int> others(cpc.begin(), cpc.end() - 1);
    if (cfg.max_conditioning_size && *cfg.max_conditioning_size == 0) continue;
    const std::size_t max_extra = cfg.max_conditioning_size ? *cfg.max_conditioning_size - 1 : others.size();
    for (auto& [y, best] : min_assoc) {
      for (std::size_t level = 0; level <= std::min(max_extra, others.size()); ++level) {
        bool stop = detail::for_each_subset(others, level, [&](const std::vector<int>& s) {
          std::vector<int> z = s;
          z.push_back(added);
          const auto& t = tester.test(target, y, z);
          if (weaker(t, best)) best = t;
          return best.independent;
        });
        if (stop) break;
      }
    }
  }
  // Backward phase: drop members separable by a subset of the others.
  for (std::size_t i = 0; i < cpc.size();) {
    std::vector<int> rest;
    for (std::size_t j = 0; j < cpc.size(); ++j)
      if (j != i) rest.push_back(cpc[j]);
    bool separated = false;
    for (std::size_t level = 0; level <= detail::limit(cfg, rest.size()) && !separated; ++level)
      separated = detail::for_each_subset(rest, level, [&](const std::vector<int>& s) {
        return tester.test(target, cpc[i], s).independent;
      });
    if (separated)
      cpc.erase(cpc.begin() + static_cast<std::ptrdiff_t>(i));
    else
      ++i;
  }
  detail::sort_by_name(cpc, rank);
  return cpc;
}

// Hybrid parents-and-children superset of `target`: survivors of marginal
// and single-variable tests, joined with the interleaved blanket, then pruned
// only where an explicit separating set is found.
inline constexpr std::size_t kHpcPruneSetSize = 2;

inline std::vector<int> hpc(CiTester& tester, const CategoricalDataset& d, int target, const LearnerConfig& cfg) {
  const auto& names = d.names();
  const int n = static_cast<int>(names.size());
  auto rank = detail::name_ranks(names);

  std::vector<int> pcs;
  for (int x = 0; x < n; ++x)
    if (x != target && !tester.test(target, x, {}).independent) pcs.push_back(x);
  detail::sort_by_name(pcs, rank);
  std::vector<int> kept;
  const bool singles = !cfg.max_conditioning_size || *cfg.max_conditioning_size >= 1;
  for (int x : pcs) {
    bool separated = false;
    if (singles)
      for (int z : pcs)
        if (z != x && tester.test(target, x, {z}).independent) {
          separated = true;
          break;
        }
    if (!separated) kept.push_back(x);
  }

  auto blanket = markov_blanket(tester, d, target);
  std::vector<int> superset = kept;
  superset.insert(superset.end(), blanket.begin(), blanket.end());
  std::sort(superset.begin(), superset.end());
  superset.erase(std::unique(superset.begin(), superset.end()), superset.end());
  detail::sort_by_name(superset, rank);

  // Pruning looks only at small separating sets: a false removal here is
  // final, an extra candidate only widens the score search.
  std::vector<int> out;
  for (int x : superset) {
    std::vector<int> rest;
    for (int v : superset)
      if (v != x) rest.push_back(v);
    bool separated = false;
    const std::size_t max_level = std::min(detail::limit(cfg, rest.size()), kHpcPruneSetSize);
    for (std::size_t level = 0; level <= max_level && !separated; ++level)
      separated = detail::for_each_subset(rest, level, [&](const std::vector<int>& s) {
        return tester.test(target, x, s).independent;
      });
    if (!separated) out.push_back(x);
  }
  return out;
}

namespace detail {

template <typename Restrict>
LearnResult restrict_maximize(Algorithm algo, const CategoricalDataset& d, const LearnerConfig& cfg,
                              const KnowledgeConstraints& k, std::shared_ptr<LocalScoreCache> cache, bool by_union,
                              Restrict&& restrict) {
  cfg.validate();
  auto mask = make_mask(d, k);
  const auto& names = d.names();
  const auto n = names.size();
  CiTester tester(d, cfg.alpha);
  std::vector<std::vector<int>> sets(n);
  for (std::size_t t = 0; t < n; ++t) sets[t] = restrict(tester, d, static_cast<int>(t), cfg);
  sets = symmetric_blankets(std::move(sets), by_union);

  LearnResult r;
  std::vector<std::uint8_t> allowed(n * n, 0);
  auto rank = detail::name_ranks(names);
  for (std::size_t t = 0; t < n; ++t) {
    for (int x : sets[t]) {
      allowed[t * n + static_cast<std::size_t>(x)] = 1;
      allowed[static_cast<std::size_t>(x) * n + t] = 1;
    }
    sort_by_name(sets[t], rank);
    r.candidates[names[t]] = names_of(sets[t], names);
  }
  r.trace.push_back("restrict phase: " + std::to_string(tester.tests()) + " tests");
  r.stats.tests = tester.tests();
  return run_score_search(algo, d, cfg, mask, &allowed, std::move(cache), std::move(r));
}

}  // namespace detail

inline LearnResult learn_mmhc(const CategoricalDataset& d, const LearnerConfig& cfg, const KnowledgeConstraints& k,
                              std::shared_ptr<LocalScoreCache> cache = nullptr) {
  return detail::restrict_maximize(Algorithm::kMmhc, d, cfg, k, std::move(cache), false,
                                   [](CiTester& t, const CategoricalDataset& data, int target, const LearnerConfig& c) {
                                     return mmpc(t, data, target, c);
                                   });
}

inline LearnResult learn_h2pc(const CategoricalDataset& d, const LearnerConfig& cfg, const KnowledgeConstraints& k,
                              std::shared_ptr<LocalScoreCache> cache = nullptr) {
  return detail::restrict_maximize(Algorithm::kH2pc, d, cfg, k, std::move(cache), true,
                                   [](CiTester& t, const CategoricalDataset& data, int target, const LearnerConfig& c) {
                                     return hpc(t, data, target, c);
                                   });
}

}  // namespace causalbn
