#pragma once

// Reference implementations used only by the tests. They are written from
// definitions (d-separation, brute-force enumeration) and share no code with
// the library beyond the graph containers.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "causalbn/bayesnet.hpp"
#include "causalbn/graph.hpp"

namespace oracle {

using causalbn::Dag;
using causalbn::Pdag;

// Adjacency-matrix DAG for brute-force work.
struct Mat {
  int n = 0;
  std::vector<std::vector<char>> e;  // e[a][b]: a -> b
};

inline Mat from_dag(const Dag& g) {
  Mat m;
  m.n = static_cast<int>(g.size());
  m.e.assign(static_cast<std::size_t>(m.n), std::vector<char>(static_cast<std::size_t>(m.n), 0));
  for (int a = 0; a < m.n; ++a)
    for (int b = 0; b < m.n; ++b)
      if (g.has_edge(a, b)) m.e[a][b] = 1;
  return m;
}

inline bool acyclic(const Mat& m) {
  std::vector<int> state(static_cast<std::size_t>(m.n), 0);
  std::function<bool(int)> dfs = [&](int v) {
    state[v] = 1;
    for (int c = 0; c < m.n; ++c)
      if (m.e[v][c]) {
        if (state[c] == 1) return false;
        if (state[c] == 0 && !dfs(c)) return false;
      }
    state[v] = 2;
    return true;
  };
  for (int v = 0; v < m.n; ++v)
    if (state[v] == 0 && !dfs(v)) return false;
  return true;
}

// Every DAG over n labelled nodes (n <= 4 keeps this at 543 graphs).
inline std::vector<Mat> all_dags(int n) {
  std::vector<std::pair<int, int>> pairs;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) pairs.emplace_back(a, b);
  std::vector<Mat> out;
  std::size_t total = 1;
  for (std::size_t i = 0; i < pairs.size(); ++i) total *= 3;
  for (std::size_t code = 0; code < total; ++code) {
    Mat m;
    m.n = n;
    m.e.assign(static_cast<std::size_t>(n), std::vector<char>(static_cast<std::size_t>(n), 0));
    std::size_t c = code;
    for (auto [a, b] : pairs) {
      int s = static_cast<int>(c % 3);
      c /= 3;
      if (s == 1) m.e[a][b] = 1;
      if (s == 2) m.e[b][a] = 1;
    }
    if (acyclic(m)) out.push_back(m);
  }
  return out;
}

inline Dag to_dag(const Mat& m, const std::vector<std::string>& names) {
  Dag g(names);
  for (int a = 0; a < m.n; ++a)
    for (int b = 0; b < m.n; ++b)
      if (m.e[a][b]) g.add_edge(a, b);
  return g;
}

// d-separation of x and y given z via the moralised ancestral graph.
inline bool d_separated(const Mat& m, int x, int y, const std::vector<int>& z) {
  std::vector<char> anc(static_cast<std::size_t>(m.n), 0);
  std::vector<int> stack{x, y};
  stack.insert(stack.end(), z.begin(), z.end());
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (anc[v]) continue;
    anc[v] = 1;
    for (int p = 0; p < m.n; ++p)
      if (m.e[p][v]) stack.push_back(p);
  }
  std::vector<std::vector<char>> u(static_cast<std::size_t>(m.n), std::vector<char>(static_cast<std::size_t>(m.n), 0));
  for (int a = 0; a < m.n; ++a)
    for (int b = 0; b < m.n; ++b)
      if (anc[a] && anc[b] && m.e[a][b]) u[a][b] = u[b][a] = 1;
  for (int c = 0; c < m.n; ++c) {
    if (!anc[c]) continue;
    for (int a = 0; a < m.n; ++a)
      for (int b = 0; b < m.n; ++b)
        if (a != b && m.e[a][c] && m.e[b][c]) u[a][b] = u[b][a] = 1;
  }
  std::vector<char> blocked(static_cast<std::size_t>(m.n), 0), seen(static_cast<std::size_t>(m.n), 0);
  for (int v : z) blocked[v] = 1;
  stack = {x};
  while (!stack.empty()) {
    int v = stack.back();
    stack.pop_back();
    if (seen[v]) continue;
    seen[v] = 1;
    if (v == y) return false;
    for (int w = 0; w < m.n; ++w)
      if (u[v][w] && anc[w] && !blocked[w]) stack.push_back(w);
  }
  return true;
}

// All d-separation statements of a DAG; equal signatures = Markov equivalent.
inline std::vector<char> independence_signature(const Mat& m) {
  std::vector<char> sig;
  for (int x = 0; x < m.n; ++x)
    for (int y = x + 1; y < m.n; ++y) {
      std::vector<int> others;
      for (int v = 0; v < m.n; ++v)
        if (v != x && v != y) others.push_back(v);
      for (std::size_t mask = 0; mask < (std::size_t{1} << others.size()); ++mask) {
        std::vector<int> z;
        for (std::size_t i = 0; i < others.size(); ++i)
          if (mask >> i & 1) z.push_back(others[i]);
        sig.push_back(d_separated(m, x, y, z) ? 1 : 0);
      }
    }
  return sig;
}

// Pair status: 0 absent, 1 undirected, 2 a->b, 3 b->a, for a < b by index.
using Status = std::vector<int>;

// Consensus over an equivalence class: a pair is directed only if every
// member orients it the same way.
inline Status class_status(const std::vector<Mat>& members) {
  const int n = members.front().n;
  Status s;
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      bool fwd = false, bwd = false, adj = false;
      for (const auto& m : members) {
        if (m.e[a][b]) fwd = adj = true;
        if (m.e[b][a]) bwd = adj = true;
      }
      s.push_back(!adj ? 0 : (fwd && bwd) ? 1 : fwd ? 2 : 3);
    }
  return s;
}

inline Status pdag_status(const Pdag& p) {
  Status s;
  const int n = static_cast<int>(p.size());
  for (int a = 0; a < n; ++a)
    for (int b = a + 1; b < n; ++b) {
      if (p.undirected(a, b))
        s.push_back(1);
      else if (p.directed(a, b))
        s.push_back(2);
      else if (p.directed(b, a))
        s.push_back(3);
      else
        s.push_back(0);
    }
  return s;
}

// Structural Hamming distance from first principles, matching nodes by name.
inline std::size_t shd(const Pdag& a, const Pdag& b) {
  auto status = [](const Pdag& p, const std::string& x, const std::string& y) {
    int i = p.index_of(x), j = p.index_of(y);
    if (p.undirected(i, j)) return 1;
    if (p.directed(i, j)) return 2;
    if (p.directed(j, i)) return 3;
    return 0;
  };
  std::vector<std::string> names = a.nodes();
  std::sort(names.begin(), names.end());
  std::size_t d = 0;
  for (std::size_t i = 0; i < names.size(); ++i)
    for (std::size_t j = i + 1; j < names.size(); ++j)
      d += status(a, names[i], names[j]) != status(b, names[i], names[j]);
  return d;
}

inline std::set<std::tuple<int, int, int>> v_structs(const Mat& m) {
  std::set<std::tuple<int, int, int>> out;
  for (int c = 0; c < m.n; ++c)
    for (int a = 0; a < m.n; ++a)
      for (int b = a + 1; b < m.n; ++b)
        if (m.e[a][c] && m.e[b][c] && !m.e[a][b] && !m.e[b][a]) out.insert({a, c, b});
  return out;
}

// Equivalence class of m by orienting its skeleton every way and keeping
// acyclic orientations with the same v-structures (Verma-Pearl).
inline std::vector<Mat> equivalence_class(const Mat& m) {
  std::vector<std::pair<int, int>> edges;
  for (int a = 0; a < m.n; ++a)
    for (int b = a + 1; b < m.n; ++b)
      if (m.e[a][b] || m.e[b][a]) edges.emplace_back(a, b);
  auto target = v_structs(m);
  std::vector<Mat> out;
  for (std::size_t code = 0; code < (std::size_t{1} << edges.size()); ++code) {
    Mat c;
    c.n = m.n;
    c.e.assign(static_cast<std::size_t>(m.n), std::vector<char>(static_cast<std::size_t>(m.n), 0));
    for (std::size_t i = 0; i < edges.size(); ++i) {
      auto [a, b] = edges[i];
      if (code >> i & 1)
        c.e[b][a] = 1;
      else
        c.e[a][b] = 1;
    }
    if (acyclic(c) && v_structs(c) == target) out.push_back(c);
  }
  return out;
}

// Joint probability of a full assignment, from the tables.
inline double joint(const causalbn::DiscreteBayesNet& net, const std::vector<int>& x) {
  double p = 1;
  for (int v = 0; v < static_cast<int>(net.size()); ++v) {
    const auto& c = net.cpt(v);
    std::size_t cfg = 0;
    for (std::size_t i = 0; i < c.parents.size(); ++i)
      cfg = cfg * c.parent_cardinalities[i] + static_cast<std::size_t>(x[static_cast<std::size_t>(c.parents[i])]);
    p *= c.table[cfg * c.cardinality + static_cast<std::size_t>(x[static_cast<std::size_t>(v)])];
  }
  return p;
}

// Visits every full assignment.
template <typename F>
void for_each_assignment(const causalbn::DiscreteBayesNet& net, F&& f) {
  std::vector<int> x(net.size(), 0);
  while (true) {
    f(x);
    std::size_t i = 0;
    for (; i < x.size(); ++i) {
      if (++x[i] < static_cast<int>(net.cardinality(static_cast<int>(i)))) break;
      x[i] = 0;
    }
    if (i == x.size()) return;
  }
}

// P(target = state | evidence) by summing the full joint.
inline double enumerate(const causalbn::DiscreteBayesNet& net, int target, int state, const std::map<int, int>& evidence) {
  double num = 0, den = 0;
  for_each_assignment(net, [&](const std::vector<int>& x) {
    for (const auto& [v, s] : evidence)
      if (x[static_cast<std::size_t>(v)] != s) return;
    double p = joint(net, x);
    den += p;
    if (x[static_cast<std::size_t>(target)] == state) num += p;
  });
  return num / den;
}

// P(target = state | do(interventions)) by the truncated factorisation:
// product of the tables of non-intervened nodes over assignments consistent
// with the interventions.
inline double truncated(const causalbn::DiscreteBayesNet& net, int target, int state, const std::map<int, int>& interventions) {
  double num = 0, den = 0;
  for_each_assignment(net, [&](const std::vector<int>& x) {
    for (const auto& [v, s] : interventions)
      if (x[static_cast<std::size_t>(v)] != s) return;
    double p = 1;
    for (int v = 0; v < static_cast<int>(net.size()); ++v) {
      if (interventions.count(v)) continue;
      const auto& c = net.cpt(v);
      std::size_t cfg = 0;
      for (std::size_t i = 0; i < c.parents.size(); ++i)
        cfg = cfg * c.parent_cardinalities[i] + static_cast<std::size_t>(x[static_cast<std::size_t>(c.parents[i])]);
      p *= c.table[cfg * c.cardinality + static_cast<std::size_t>(x[static_cast<std::size_t>(v)])];
    }
    den += p;
    if (x[static_cast<std::size_t>(target)] == state) num += p;
  });
  return num / den;
}

// Log-likelihood-based BIC from raw counting, natural log.
inline double bic(const Dag& g, const causalbn::CategoricalDataset& d) {
  double total = 0;
  const double n = static_cast<double>(d.rows());
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    int v = d.index_of(g.name(i));
    std::vector<int> pa;
    for (int p : g.parents(i)) pa.push_back(d.index_of(g.name(p)));
    std::map<std::vector<int>, std::map<int, double>> cnt;
    for (std::size_t r = 0; r < d.rows(); ++r) {
      std::vector<int> key;
      for (int p : pa) key.push_back(d.at(r, static_cast<std::size_t>(p)));
      cnt[key][d.at(r, static_cast<std::size_t>(v))] += 1;
    }
    for (const auto& [key, row] : cnt) {
      double nj = 0;
      for (const auto& [s, c] : row) nj += c;
      for (const auto& [s, c] : row) total += c * std::log(c / nj);
    }
    double q = 1;
    for (int p : pa) q *= static_cast<double>(d.cardinality(static_cast<std::size_t>(p)));
    total -= 0.5 * (static_cast<double>(d.cardinality(static_cast<std::size_t>(v))) - 1) * q * std::log(n);
  }
  return total;
}

}  // namespace oracle
