#pragma once

// Decomposable BIC / log-likelihood scoring with a shared local-score cache,
// free-parameter counting, and the G² conditional-independence test.
//
// All logarithms are natural. BIC follows the higher-is-better convention:
//   BIC(G, D) = sum_i [ LL_i - (r_i - 1) q_i / 2 * ln n ].

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <boost/math/special_functions/gamma.hpp>

#include "causalbn/dataset.hpp"
#include "causalbn/graph.hpp"

namespace causalbn {

namespace detail {

// Dataset variable index of every graph node, matched by name.
inline std::vector<int> node_variables(const detail::NodeSet& g, const CategoricalDataset& d) {
  std::vector<int> out;
  for (const auto& n : g.nodes()) {
    auto v = d.find(n);
    if (!v) throw DataError("graph node '" + n + "' is not a dataset variable");
    out.push_back(*v);
  }
  return out;
}

inline double xlogx_ratio(double a, double b) { return a > 0 ? a * std::log(a / b) : 0.0; }

}  // namespace detail

// (r - 1) * prod(parent cardinalities), as a double since the product can
// exceed 64 bits for wide families.
inline double family_free_parameters(const CategoricalDataset& d, int node, std::span<const int> parents) {
  double q = 1;
  for (int p : parents) q *= static_cast<double>(d.cardinality(static_cast<std::size_t>(p)));
  return (static_cast<double>(d.cardinality(static_cast<std::size_t>(node))) - 1) * q;
}

inline double free_parameters(const Dag& g, const CategoricalDataset& d) {
  auto var = detail::node_variables(g, d);
  double total = 0;
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    std::vector<int> pa;
    for (int p : g.parents(i)) pa.push_back(var[static_cast<std::size_t>(p)]);
    total += family_free_parameters(d, var[static_cast<std::size_t>(i)], pa);
  }
  return total;
}

// Maximum-likelihood log-likelihood contribution of one family.
inline double family_log_likelihood(const CategoricalDataset& d, int node, std::span<const int> parents) {
  const auto r = d.cardinality(static_cast<std::size_t>(node));
  auto cfg = compact_configs(d, parents);
  std::vector<std::uint32_t> n_jk(cfg.count * r, 0);
  std::vector<std::uint32_t> n_j(cfg.count, 0);
  auto col = d.column(static_cast<std::size_t>(node));
  for (std::size_t i = 0; i < d.rows(); ++i) {
    ++n_jk[cfg.ids[i] * r + static_cast<std::size_t>(col[i])];
    ++n_j[cfg.ids[i]];
  }
  double ll = 0;
  for (std::size_t j = 0; j < cfg.count; ++j) {
    if (n_j[j] == 0) continue;
    for (std::size_t k = 0; k < r; ++k)
      ll += detail::xlogx_ratio(static_cast<double>(n_jk[j * r + k]), static_cast<double>(n_j[j]));
  }
  return ll;
}

inline double family_bic(const CategoricalDataset& d, int node, std::span<const int> parents) {
  return family_log_likelihood(d, node, parents) -
         0.5 * family_free_parameters(d, node, parents) * std::log(static_cast<double>(d.rows()));
}

// Thread-safe memo of local scores keyed on (node, sorted parent set).
class LocalScoreCache {
 public:
  std::optional<double> lookup(int node, const std::vector<int>& parents) const {
    std::shared_lock lock(mu_);
    auto it = map_.find(key(node, parents));
    if (it == map_.end()) {
      ++misses_;
      return std::nullopt;
    }
    ++hits_;
    return it->second;
  }

  void store(int node, const std::vector<int>& parents, double value) {
    std::unique_lock lock(mu_);
    map_.emplace(key(node, parents), value);
  }

  std::size_t hits() const { return hits_; }
  std::size_t misses() const { return misses_; }
  std::size_t size() const {
    std::shared_lock lock(mu_);
    return map_.size();
  }

 private:
  static std::string key(int node, const std::vector<int>& parents) {
    std::string k;
    k.reserve(4 * (parents.size() + 1));
    auto put = [&](int x) { k.append(reinterpret_cast<const char*>(&x), sizeof(int)); };
    put(node);
    for (int p : parents) put(p);
    return k;
  }

  mutable std::shared_mutex mu_;
  std::unordered_map<std::string, double> map_;
  mutable std::atomic<std::size_t> hits_{0};
  mutable std::atomic<std::size_t> misses_{0};
};

// BIC scorer bound to one complete dataset. Local scores are cached.
class BicScorer {
 public:
  explicit BicScorer(const CategoricalDataset& d, std::shared_ptr<LocalScoreCache> cache = nullptr)
      : data_(&d), cache_(cache ? std::move(cache) : std::make_shared<LocalScoreCache>()) {
    d.require_complete("BIC scoring");
  }

  const CategoricalDataset& data() const { return *data_; }
  const std::shared_ptr<LocalScoreCache>& cache() const { return cache_; }

  // Local BIC of dataset variable `node` given dataset variables `parents`.
  double local(int node, std::vector<int> parents) const {
    std::sort(parents.begin(), parents.end());
    if (std::find(parents.begin(), parents.end(), node) != parents.end())
      throw DataError("variable '" + data_->variable(static_cast<std::size_t>(node)).name + "' listed as its own parent");
    ++evaluations_;
    if (auto v = cache_->lookup(node, parents)) return *v;
    double s = family_bic(*data_, node, parents);
    cache_->store(node, parents, s);
    return s;
  }

  // Graph nodes must coincide with dataset variable indices (same order).
  double score_indexed(const Dag& g) const {
    double total = 0;
    for (int i = 0; i < static_cast<int>(g.size()); ++i) total += local(i, g.parents(i));
    return total;
  }

  // Local scores requested through this scorer, cached or not. Unlike cache
  // misses this does not depend on other threads sharing the cache.
  std::size_t evaluations() const { return evaluations_; }

 private:
  const CategoricalDataset* data_;
  std::shared_ptr<LocalScoreCache> cache_;
  mutable std::size_t evaluations_ = 0;
};

inline double log_likelihood(const Dag& g, const CategoricalDataset& d) {
  d.require_complete("log-likelihood");
  auto var = detail::node_variables(g, d);
  double ll = 0;
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    std::vector<int> pa;
    for (int p : g.parents(i)) pa.push_back(var[static_cast<std::size_t>(p)]);
    ll += family_log_likelihood(d, var[static_cast<std::size_t>(i)], pa);
  }
  return ll;
}

inline double local_bic(std::string_view node, const std::vector<std::string>& parents, const CategoricalDataset& d,
                         LocalScoreCache* cache = nullptr) {
  d.require_complete("BIC scoring");
  int v = d.index_of(node);
  std::vector<int> pa;
  for (const auto& p : parents) {
    pa.push_back(d.index_of(p));
    if (pa.back() == v) throw DataError("variable '" + std::string(node) + "' listed as its own parent");
  }
  std::sort(pa.begin(), pa.end());
  if (cache)
    if (auto s = cache->lookup(v, pa)) return *s;
  double s = family_bic(d, v, pa);
  if (cache) cache->store(v, pa, s);
  return s;
}

inline double bic(const Dag& g, const CategoricalDataset& d) {
  d.require_complete("BIC scoring");
  auto var = detail::node_variables(g, d);
  double total = 0;
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    std::vector<int> pa;
    for (int p : g.parents(i)) pa.push_back(var[static_cast<std::size_t>(p)]);
    total += family_bic(d, var[static_cast<std::size_t>(i)], pa);
  }
  return total;
}

// ---------------------------------------------------------------------------
// Conditional independence

struct CiTestResult {
  double statistic = 0;  // G² = 2 n MI(x; y | z), nats
  double dof = 1;
  double p_value = 1;
  bool independent = true;
  bool degenerate = false;  // x or y showed a single state
};

inline double chi_squared_survival(double statistic, double dof) {
  if (!(statistic > 0)) return 1.0;
  return boost::math::gamma_q(dof / 2.0, statistic / 2.0);
}

// G² likelihood-ratio test of x ⊥ y | z with asymptotic chi-squared p-value.
// Degrees of freedom use declared cardinalities, not reduced for empty cells.
inline CiTestResult ci_test(const CategoricalDataset& d, int x, int y, std::span<const int> z, double alpha) {
  if (x == y) throw DataError("independence test of a variable with itself");
  for (int v : z)
    if (v == x || v == y) throw DataError("conditioning set contains a tested variable");
  const auto rx = d.cardinality(static_cast<std::size_t>(x));
  const auto ry = d.cardinality(static_cast<std::size_t>(y));
  CiTestResult res;
  res.dof = static_cast<double>(rx - 1) * static_cast<double>(ry - 1);
  for (int v : z) res.dof *= static_cast<double>(d.cardinality(static_cast<std::size_t>(v)));

  auto xc = d.column(static_cast<std::size_t>(x));
  auto yc = d.column(static_cast<std::size_t>(y));
  auto observed_states = [&](std::span<const std::int32_t> c) {
    std::vector<char> seen(64, 0);
    std::size_t k = 0;
    for (auto s : c) {
      if (static_cast<std::size_t>(s) >= seen.size()) seen.resize(static_cast<std::size_t>(s) + 1, 0);
      if (!seen[static_cast<std::size_t>(s)]) {
        seen[static_cast<std::size_t>(s)] = 1;
        if (++k > 1) break;
      }
    }
    return k;
  };
  if (res.dof < 1 || observed_states(xc) < 2 || observed_states(yc) < 2) {
    res.dof = std::max(res.dof, 1.0);
    res.degenerate = true;
    return res;
  }

  auto cfg = compact_configs(d, z);
  std::vector<std::uint32_t> nxyz(cfg.count * rx * ry, 0);
  for (std::size_t i = 0; i < d.rows(); ++i)
    ++nxyz[(cfg.ids[i] * rx + static_cast<std::size_t>(xc[i])) * ry + static_cast<std::size_t>(yc[i])];
  std::vector<double> nx(rx), ny(ry);
  double g2 = 0;
  for (std::size_t c = 0; c < cfg.count; ++c) {
    const std::uint32_t* t = &nxyz[c * rx * ry];
    double nz = 0;
    std::fill(nx.begin(), nx.end(), 0.0);
    std::fill(ny.begin(), ny.end(), 0.0);
    for (std::size_t a = 0; a < rx; ++a)
      for (std::size_t b = 0; b < ry; ++b) {
        double v = t[a * ry + b];
        nx[a] += v;
        ny[b] += v;
        nz += v;
      }
    if (nz == 0) continue;
    for (std::size_t a = 0; a < rx; ++a)
      for (std::size_t b = 0; b < ry; ++b) {
        double v = t[a * ry + b];
        if (v > 0) g2 += v * std::log(v * nz / (nx[a] * ny[b]));
      }
  }
  res.statistic = std::max(0.0, 2.0 * g2);
  res.p_value = std::clamp(chi_squared_survival(res.statistic, res.dof), 0.0, 1.0);
  res.independent = res.p_value > alpha;
  return res;
}

inline CiTestResult ci_test(const CategoricalDataset& d, std::string_view x, std::string_view y,
                            const std::vector<std::string>& z, double alpha) {
  std::vector<int> zi;
  for (const auto& v : z) zi.push_back(d.index_of(v));
  return ci_test(d, d.index_of(x), d.index_of(y), zi, alpha);
}

// Per-run test driver: counts tests and memoises results on the canonical
// (unordered pair, sorted conditioning set) key.
class CiTester {
 public:
  CiTester(const CategoricalDataset& d, double alpha) : data_(&d), alpha_(alpha) {
    d.require_complete("independence testing");
  }

  double alpha() const { return alpha_; }
  std::size_t tests() const { return tests_; }

  const CiTestResult& test(int x, int y, std::vector<int> z) {
    if (x > y) std::swap(x, y);
    std::sort(z.begin(), z.end());
    std::string k;
    auto put = [&](int v) { k.append(reinterpret_cast<const char*>(&v), sizeof(int)); };
    put(x);
    put(y);
    for (int v : z) put(v);
    auto it = memo_.find(k);
    if (it != memo_.end()) return it->second;
    ++tests_;
    return memo_.emplace(std::move(k), ci_test(*data_, x, y, z, alpha_)).first->second;
  }

 private:
  const CategoricalDataset* data_;
  double alpha_;
  std::size_t tests_ = 0;
  std::unordered_map<std::string, CiTestResult> memo_;
};

// Orders two test results by strength of dependence: smaller p-value first,
// then larger statistic relative to its degrees of freedom.
inline bool stronger_association(const CiTestResult& a, const CiTestResult& b) {
  if (a.p_value != b.p_value) return a.p_value < b.p_value;
  return a.statistic - a.dof > b.statistic - b.dof;
}

}  // namespace causalbn
