#pragma once

// The six structure learners behind one dispatcher.

#include <future>
#include <map>
#include <memory>
#include <vector>

#include "causalbn/learners/common.hpp"
#include "causalbn/learners/constraint_based.hpp"
#include "causalbn/learners/hybrid.hpp"
#include "causalbn/learners/score_search.hpp"

namespace causalbn {

inline LearnResult learn(const CategoricalDataset& d, const LearnerConfig& cfg, const KnowledgeConstraints& k,
                         std::shared_ptr<LocalScoreCache> cache = nullptr) {
  switch (cfg.algorithm) {
    case Algorithm::kPcStable: return learn_pc_stable(d, cfg, k, std::move(cache));
    case Algorithm::kInterIamb: return learn_inter_iamb(d, cfg, k, std::move(cache));
    case Algorithm::kHc: return learn_hc(d, cfg, k, std::move(cache));
    case Algorithm::kTabu: return learn_tabu(d, cfg, k, std::move(cache));
    case Algorithm::kMmhc: return learn_mmhc(d, cfg, k, std::move(cache));
    case Algorithm::kH2pc: return learn_h2pc(d, cfg, k, std::move(cache));
  }
  throw Error("unknown algorithm");
}

// Runs several learners concurrently over one dataset with a shared score
// cache. Results come back in the order of `algorithms`.
inline std::vector<LearnResult> learn_all(const CategoricalDataset& d, const LearnerConfig& base,
                                          const KnowledgeConstraints& k,
                                          const std::vector<Algorithm>& algorithms = all_algorithms()) {
  base.validate();
  ConstraintMask(k, d.names());  // fail fast before spawning
  auto cache = std::make_shared<LocalScoreCache>();
  std::vector<std::future<LearnResult>> jobs;
  for (auto a : algorithms) {
    LearnerConfig cfg = base;
    cfg.algorithm = a;
    jobs.push_back(std::async(std::launch::async, [&d, &k, cfg, cache] { return learn(d, cfg, k, cache); }));
  }
  std::vector<LearnResult> out;
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace causalbn
