#pragma once

// Directed acyclic graphs, partially directed graphs and the graph algebra
// shared by the learners: CPDAG conversion, Meek closure, structural Hamming
// distance, fragment counting, consistent extension, DOT and JSON export.

#include <algorithm>
#include <cctype>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <queue>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalbn/error.hpp"

namespace causalbn {

struct Edge {
  int from = 0;
  int to = 0;
  friend auto operator<=>(const Edge&, const Edge&) = default;
};

using NamedEdge = std::pair<std::string, std::string>;

// Returns true when the directed edge from -> to may be used.
using EdgePredicate = std::function<bool(int, int)>;

namespace detail {

inline std::unordered_map<std::string, int> build_index(const std::vector<std::string>& names) {
  std::unordered_map<std::string, int> index;
  index.reserve(names.size());
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (names[i].empty()) throw GraphError("empty node name");
    if (!index.emplace(names[i], static_cast<int>(i)).second)
      throw GraphError("duplicate node name '" + names[i] + "'");
  }
  return index;
}

// rank[i] is the position of names[i] in lexicographic order.
inline std::vector<int> name_ranks(const std::vector<std::string>& names) {
  std::vector<int> order(names.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](int a, int b) { return names[a] < names[b]; });
  std::vector<int> rank(names.size());
  for (std::size_t r = 0; r < order.size(); ++r) rank[order[r]] = static_cast<int>(r);
  return rank;
}

// Shared node bookkeeping for Dag and Pdag.
class NodeSet {
 public:
  NodeSet() = default;
  explicit NodeSet(std::vector<std::string> names)
      : names_(std::move(names)), index_(build_index(names_)), rank_(name_ranks(names_)) {}

  std::size_t size() const noexcept { return names_.size(); }
  const std::vector<std::string>& nodes() const noexcept { return names_; }
  const std::string& name(int i) const { return names_.at(static_cast<std::size_t>(i)); }
  int rank(int i) const { return rank_[static_cast<std::size_t>(i)]; }

  std::optional<int> find(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
  }

  int index_of(std::string_view name) const {
    auto i = find(name);
    if (!i) throw GraphError("unknown node '" + std::string(name) + "'");
    return *i;
  }

  // Node indices sorted by name.
  std::vector<int> lexicographic_order() const {
    std::vector<int> order(size());
    for (std::size_t i = 0; i < size(); ++i) order[static_cast<std::size_t>(rank_[i])] = static_cast<int>(i);
    return order;
  }

 protected:
  void check(int i) const {
    if (i < 0 || static_cast<std::size_t>(i) >= names_.size())
      throw GraphError("node index " + std::to_string(i) + " out of range");
  }

  std::vector<std::string> names_;
  std::unordered_map<std::string, int> index_;
  std::vector<int> rank_;
};

}  // namespace detail

// Directed acyclic graph. Every mutation that would introduce a self-loop or
// a directed cycle is rejected with GraphError.
class Dag : public detail::NodeSet {
 public:
  Dag() = default;
  explicit Dag(std::vector<std::string> nodes)
      : NodeSet(std::move(nodes)), parents_(size()), children_(size()), adj_(size() * size(), 0) {}

  Dag(std::vector<std::string> nodes, const std::vector<NamedEdge>& edges) : Dag(std::move(nodes)) {
    for (const auto& [from, to] : edges) add_edge(from, to);
  }

  bool has_edge(int from, int to) const {
    return adj_[static_cast<std::size_t>(from) * size() + static_cast<std::size_t>(to)] != 0;
  }
  bool has_edge(std::string_view from, std::string_view to) const {
    return has_edge(index_of(from), index_of(to));
  }
  bool adjacent(int a, int b) const { return has_edge(a, b) || has_edge(b, a); }

  const std::vector<int>& parents(int i) const { return parents_.at(static_cast<std::size_t>(i)); }
  const std::vector<int>& children(int i) const { return children_.at(static_cast<std::size_t>(i)); }

  // True when a directed path from -> ... -> to exists (a node reaches itself).
  bool reachable(int from, int to) const {
    if (from == to) return true;
    std::vector<char> seen(size(), 0);
    std::vector<int> stack{from};
    seen[static_cast<std::size_t>(from)] = 1;
    while (!stack.empty()) {
      int v = stack.back();
      stack.pop_back();
      for (int c : children_[static_cast<std::size_t>(v)]) {
        if (c == to) return true;
        if (!seen[static_cast<std::size_t>(c)]) {
          seen[static_cast<std::size_t>(c)] = 1;
          stack.push_back(c);
        }
      }
    }
    return false;
  }

  bool can_add_edge(int from, int to) const {
    check(from);
    check(to);
    if (from == to || has_edge(from, to)) return false;
    return !reachable(to, from);
  }

  bool try_add_edge(int from, int to) {
    if (!can_add_edge(from, to)) return false;
    insert(from, to);
    return true;
  }

  void add_edge(int from, int to) {
    check(from);
    check(to);
    if (from == to) throw GraphError("self-loop on '" + name(from) + "'");
    if (has_edge(from, to)) return;
    if (reachable(to, from))
      throw GraphError("edge " + name(from) + " -> " + name(to) + " would create a cycle");
    insert(from, to);
  }
  void add_edge(std::string_view from, std::string_view to) { add_edge(index_of(from), index_of(to)); }

  void remove_edge(int from, int to) {
    if (!has_edge(from, to)) return;
    adj_[static_cast<std::size_t>(from) * size() + static_cast<std::size_t>(to)] = 0;
    erase(parents_[static_cast<std::size_t>(to)], from);
    erase(children_[static_cast<std::size_t>(from)], to);
  }

  // Reversing from -> to is legal iff no other directed path from -> to exists.
  bool can_reverse_edge(int from, int to) const {
    if (!has_edge(from, to)) return false;
    Dag copy = *this;
    copy.remove_edge(from, to);
    return !copy.reachable(from, to);
  }

  void reverse_edge(int from, int to) {
    if (!has_edge(from, to))
      throw GraphError("cannot reverse missing edge " + name(from) + " -> " + name(to));
    remove_edge(from, to);
    if (reachable(from, to)) {
      insert(from, to);
      throw GraphError("reversing " + name(from) + " -> " + name(to) + " would create a cycle");
    }
    insert(to, from);
  }

  std::vector<Edge> edges() const {
    std::vector<Edge> out;
    for (std::size_t i = 0; i < size(); ++i)
      for (int c : children_[i]) out.push_back({static_cast<int>(i), c});
    std::sort(out.begin(), out.end());
    return out;
  }

  std::size_t edge_count() const {
    std::size_t n = 0;
    for (const auto& p : parents_) n += p.size();
    return n;
  }

  std::vector<NamedEdge> named_edges() const {
    std::vector<NamedEdge> out;
    for (const auto& e : edges()) out.emplace_back(name(e.from), name(e.to));
    std::sort(out.begin(), out.end());
    return out;
  }

  friend bool operator==(const Dag& a, const Dag& b) { return a.names_ == b.names_ && a.adj_ == b.adj_; }

 private:
  void insert(int from, int to) {
    adj_[static_cast<std::size_t>(from) * size() + static_cast<std::size_t>(to)] = 1;
    auto& p = parents_[static_cast<std::size_t>(to)];
    p.insert(std::lower_bound(p.begin(), p.end(), from), from);
    auto& c = children_[static_cast<std::size_t>(from)];
    c.insert(std::lower_bound(c.begin(), c.end(), to), to);
  }

  static void erase(std::vector<int>& v, int x) {
    auto it = std::lower_bound(v.begin(), v.end(), x);
    if (it != v.end() && *it == x) v.erase(it);
  }

  std::vector<std::vector<int>> parents_;
  std::vector<std::vector<int>> children_;
  std::vector<std::uint8_t> adj_;
};

// Status of an unordered pair {a, b} viewed from a.
enum class PairStatus { kAbsent, kUndirected, kForward, kBackward };

// Partially directed graph: each node pair holds at most one edge, either
// directed or undirected.
class Pdag : public detail::NodeSet {
 public:
  Pdag() = default;
  explicit Pdag(std::vector<std::string> nodes) : NodeSet(std::move(nodes)), mark_(size() * size(), 0) {}

  static Pdag from_dag(const Dag& g) {
    Pdag p(g.nodes());
    for (const auto& e : g.edges()) p.add_directed(e.from, e.to);
    return p;
  }

  bool adjacent(int a, int b) const { return mark(a, b) || mark(b, a); }
  bool directed(int from, int to) const { return mark(from, to) && !mark(to, from); }
  bool undirected(int a, int b) const { return mark(a, b) && mark(b, a); }

  PairStatus status(int a, int b) const {
    if (undirected(a, b)) return PairStatus::kUndirected;
    if (directed(a, b)) return PairStatus::kForward;
    if (directed(b, a)) return PairStatus::kBackward;
    return PairStatus::kAbsent;
  }

  void add_directed(int from, int to) {
    check_pair(from, to);
    set(from, to, 1);
    set(to, from, 0);
  }
  void add_directed(std::string_view from, std::string_view to) { add_directed(index_of(from), index_of(to)); }

  void add_undirected(int a, int b) {
    check_pair(a, b);
    set(a, b, 1);
    set(b, a, 1);
  }
  void add_undirected(std::string_view a, std::string_view b) { add_undirected(index_of(a), index_of(b)); }

  // Turns a—b (or b->a) into a->b.
  void orient(int from, int to) { add_directed(from, to); }

  void remove(int a, int b) {
    set(a, b, 0);
    set(b, a, 0);
  }

  std::vector<Edge> directed_edges() const {
    std::vector<Edge> out;
    for (int a = 0; a < static_cast<int>(size()); ++a)
      for (int b = 0; b < static_cast<int>(size()); ++b)
        if (directed(a, b)) out.push_back({a, b});
    return out;
  }

  // Undirected edges reported once with from < to.
  std::vector<Edge> undirected_edges() const {
    std::vector<Edge> out;
    for (int a = 0; a < static_cast<int>(size()); ++a)
      for (int b = a + 1; b < static_cast<int>(size()); ++b)
        if (undirected(a, b)) out.push_back({a, b});
    return out;
  }

  std::size_t edge_count() const { return directed_edges().size() + undirected_edges().size(); }

  std::vector<int> adjacents(int a) const {
    std::vector<int> out;
    for (int b = 0; b < static_cast<int>(size()); ++b)
      if (b != a && adjacent(a, b)) out.push_back(b);
    return out;
  }

  // True when the directed edges alone contain a cycle.
  bool has_directed_cycle() const {
    Dag d(nodes());
    for (const auto& e : directed_edges())
      if (!d.try_add_edge(e.from, e.to)) return true;
    return false;
  }

  friend bool operator==(const Pdag& a, const Pdag& b) { return a.names_ == b.names_ && a.mark_ == b.mark_; }

 private:
  bool mark(int a, int b) const {
    return mark_[static_cast<std::size_t>(a) * size() + static_cast<std::size_t>(b)] != 0;
  }
  void set(int a, int b, std::uint8_t v) {
    mark_[static_cast<std::size_t>(a) * size() + static_cast<std::size_t>(b)] = v;
  }
  void check_pair(int a, int b) const {
    check(a);
    check(b);
    if (a == b) throw GraphError("self-loop on '" + name(a) + "'");
  }

  std::vector<std::uint8_t> mark_;
};

// Topological order as node indices; ready nodes are emitted in name order.
inline std::vector<int> topological_order(const Dag& g) {
  std::vector<std::size_t> pending(g.size());
  auto by_name = [&](int a, int b) { return g.rank(a) > g.rank(b); };
  std::priority_queue<int, std::vector<int>, decltype(by_name)> ready(by_name);
  for (int i = 0; i < static_cast<int>(g.size()); ++i) {
    pending[static_cast<std::size_t>(i)] = g.parents(i).size();
    if (pending[static_cast<std::size_t>(i)] == 0) ready.push(i);
  }
  std::vector<int> order;
  order.reserve(g.size());
  while (!ready.empty()) {
    int v = ready.top();
    ready.pop();
    order.push_back(v);
    for (int c : g.children(v))
      if (--pending[static_cast<std::size_t>(c)] == 0) ready.push(c);
  }
  return order;
}

inline std::vector<std::string> topological_sort(const Dag& g) {
  std::vector<std::string> out;
  for (int i : topological_order(g)) out.push_back(g.name(i));
  return out;
}

// Applies Meek's orientation rules R1-R4 until closure. Orientations rejected
// by `allowed` or that would close a directed cycle are skipped. Returns the
// number of edges oriented.
inline std::size_t apply_meek_rules(Pdag& p, const EdgePredicate& allowed = {}) {
  const int n = static_cast<int>(p.size());
  auto rule_applies = [&](int a, int b) {
    for (int c = 0; c < n; ++c) {
      if (c == a || c == b) continue;
      if (p.directed(c, a) && !p.adjacent(c, b)) return true;  // R1
      if (p.directed(a, c) && p.directed(c, b)) return true;   // R2
    }
    for (int c = 0; c < n; ++c) {
      if (c == a || c == b || !p.undirected(a, c) || !p.directed(c, b)) continue;
      for (int d = c + 1; d < n; ++d) {
        if (d == a || d == b) continue;
        if (p.undirected(a, d) && p.directed(d, b) && !p.adjacent(c, d)) return true;  // R3
      }
    }
    for (int c = 0; c < n; ++c) {
      if (c == a || c == b || !p.undirected(a, c) || p.adjacent(c, b)) continue;
      for (int d = 0; d < n; ++d) {
        if (d == a || d == b || d == c) continue;
        if (p.adjacent(a, d) && p.directed(c, d) && p.directed(d, b)) return true;  // R4
      }
    }
    return false;
  };
  auto closes_cycle = [&](int a, int b) {
    Dag d(p.nodes());
    for (const auto& e : p.directed_edges()) d.try_add_edge(e.from, e.to);
    return d.reachable(b, a);
  };

  std::size_t oriented = 0;
  bool changed = true;
  while (changed) {
    changed = false;
    for (int a = 0; a < n; ++a) {
      for (int b = a + 1; b < n; ++b) {
        if (!p.undirected(a, b)) continue;
        for (auto [x, y] : {std::pair{a, b}, std::pair{b, a}}) {
          if (allowed && !allowed(x, y)) continue;
          if (!rule_applies(x, y) || closes_cycle(x, y)) continue;
          p.orient(x, y);
          ++oriented;
          changed = true;
          break;
        }
      }
    }
  }
  return oriented;
}

// Completed PDAG of the Markov equivalence class of g: v-structure edges are
// directed, then Meek closure directs the remaining compelled edges.
inline Pdag to_cpdag(const Dag& g) {
  Pdag p(g.nodes());
  for (const auto& e : g.edges()) p.add_undirected(e.from, e.to);
  for (int c = 0; c < static_cast<int>(g.size()); ++c) {
    const auto& pa = g.parents(c);
    for (std::size_t i = 0; i < pa.size(); ++i)
      for (std::size_t j = i + 1; j < pa.size(); ++j)
        if (!g.adjacent(pa[i], pa[j])) {
          p.orient(pa[i], c);
          p.orient(pa[j], c);
        }
  }
  apply_meek_rules(p);
  return p;
}

// Structural Hamming distance: number of unordered pairs whose status
// (absent, undirected, directed either way) differs. Nodes are matched by name.
inline std::size_t shd(const Pdag& a, const Pdag& b) {
  std::set<std::string> na(a.nodes().begin(), a.nodes().end());
  std::set<std::string> nb(b.nodes().begin(), b.nodes().end());
  if (na != nb) {
    std::string diff;
    for (const auto& s : na)
      if (!nb.count(s)) diff += (diff.empty() ? "" : ", ") + s;
    for (const auto& s : nb)
      if (!na.count(s)) diff += (diff.empty() ? "" : ", ") + s;
    throw GraphError("node sets differ: " + diff);
  }
  std::vector<int> map(a.size());
  for (int i = 0; i < static_cast<int>(a.size()); ++i) map[static_cast<std::size_t>(i)] = b.index_of(a.name(i));
  std::size_t d = 0;
  for (int i = 0; i < static_cast<int>(a.size()); ++i)
    for (int j = i + 1; j < static_cast<int>(a.size()); ++j)
      if (a.status(i, j) != b.status(map[static_cast<std::size_t>(i)], map[static_cast<std::size_t>(j)])) ++d;
  return d;
}

// Connected components of the skeleton; isolated nodes count.
inline std::size_t count_fragments(const Pdag& g) {
  std::vector<int> parent(g.size());
  std::iota(parent.begin(), parent.end(), 0);
  std::function<int(int)> root = [&](int x) {
    while (parent[static_cast<std::size_t>(x)] != x) x = parent[static_cast<std::size_t>(x)] = parent[static_cast<std::size_t>(parent[static_cast<std::size_t>(x)])];
    return x;
  };
  std::size_t components = g.size();
  for (int a = 0; a < static_cast<int>(g.size()); ++a)
    for (int b = a + 1; b < static_cast<int>(g.size()); ++b)
      if (g.adjacent(a, b)) {
        int ra = root(a), rb = root(b);
        if (ra != rb) {
          parent[static_cast<std::size_t>(ra)] = rb;
          --components;
        }
      }
  return components;
}

inline std::size_t count_fragments(const Dag& g) { return count_fragments(Pdag::from_dag(g)); }

// Unshielded colliders a -> c <- b (a < b) of the directed part.
inline std::set<std::tuple<int, int, int>> v_structures(const Pdag& p) {
  std::set<std::tuple<int, int, int>> out;
  const int n = static_cast<int>(p.size());
  for (int c = 0; c < n; ++c)
    for (int a = 0; a < n; ++a)
      for (int b = a + 1; b < n; ++b)
        if (a != c && b != c && p.directed(a, c) && p.directed(b, c) && !p.adjacent(a, b)) out.emplace(a, c, b);
  return out;
}

inline std::set<std::tuple<int, int, int>> v_structures(const Dag& g) { return v_structures(Pdag::from_dag(g)); }

// True when d has p's skeleton and v-structures and contains p's directed edges.
inline bool is_consistent_extension(const Pdag& p, const Dag& d) {
  if (p.nodes() != d.nodes()) return false;
  for (int a = 0; a < static_cast<int>(p.size()); ++a)
    for (int b = 0; b < static_cast<int>(p.size()); ++b) {
      if (a == b) continue;
      if (p.adjacent(a, b) != d.adjacent(a, b)) return false;
      if (p.directed(a, b) && !d.has_edge(a, b)) return false;
    }
  return v_structures(p) == v_structures(d);
}

struct Extension {
  Dag dag;
  // Set when no consistent extension existed and an arbitrary acyclic
  // orientation was used instead.
  bool forced = false;
};

namespace detail {

inline Dag directed_part(const Pdag& p) {
  Dag d(p.nodes());
  for (const auto& e : p.directed_edges())
    if (!d.try_add_edge(e.from, e.to))
      throw GraphError("directed edges of the PDAG contain a cycle through " + p.name(e.from) + " -> " +
                       p.name(e.to));
  return d;
}

// Undirected pairs (u, v) with name(u) < name(v), in lexicographic order.
inline std::vector<Edge> lexicographic_undirected(const Pdag& p) {
  std::vector<Edge> pairs;
  for (const auto& e : p.undirected_edges())
    pairs.push_back(p.rank(e.from) < p.rank(e.to) ? e : Edge{e.to, e.from});
  std::sort(pairs.begin(), pairs.end(), [&](const Edge& x, const Edge& y) {
    return std::pair(p.rank(x.from), p.rank(x.to)) < std::pair(p.rank(y.from), p.rank(y.to));
  });
  return pairs;
}

inline std::optional<Dag> greedy_extension(const Pdag& p, const EdgePredicate& allowed) {
  Dag d = directed_part(p);
  for (const auto& e : lexicographic_undirected(p)) {
    bool placed = false;
    for (auto [x, y] : {std::pair{e.from, e.to}, std::pair{e.to, e.from}}) {
      if (allowed && !allowed(x, y)) continue;
      if (!d.can_add_edge(x, y)) continue;
      bool collider = false;
      for (int w : d.parents(y))
        if (w != x && !p.adjacent(w, x)) collider = true;
      if (collider) continue;
      d.add_edge(x, y);
      placed = true;
      break;
    }
    if (!placed) return std::nullopt;
  }
  if (!is_consistent_extension(p, d)) return std::nullopt;
  return d;
}

// Dor-Tarsi: repeatedly remove a sink whose undirected neighbours are
// adjacent to all of its other neighbours. The largest-named candidate is
// taken first so a lone a—b becomes a -> b.
inline std::optional<Dag> dor_tarsi_extension(const Pdag& p, const EdgePredicate& allowed) {
  Dag d = directed_part(p);
  Pdag rest = p;
  std::vector<char> removed(p.size(), 0);
  auto order = p.lexicographic_order();
  std::reverse(order.begin(), order.end());
  for (std::size_t step = 0; step < p.size(); ++step) {
    int chosen = -1;
    for (int x : order) {
      if (removed[static_cast<std::size_t>(x)]) continue;
      bool ok = true;
      auto adj = rest.adjacents(x);
      for (int y : adj) {
        if (rest.directed(x, y)) ok = false;
        if (!ok) break;
        if (rest.undirected(x, y)) {
          if (allowed && !allowed(y, x)) ok = false;
          for (int z : adj)
            if (z != y && !rest.adjacent(y, z)) ok = false;
        }
        if (!ok) break;
      }
      if (ok) {
        chosen = x;
        break;
      }
    }
    if (chosen < 0) return std::nullopt;
    for (int y : rest.adjacents(chosen)) {
      if (rest.undirected(chosen, y) && !d.try_add_edge(y, chosen)) return std::nullopt;
      rest.remove(chosen, y);
    }
    removed[static_cast<std::size_t>(chosen)] = 1;
  }
  if (!is_consistent_extension(p, d)) return std::nullopt;
  return d;
}

}  // namespace detail

// DAG member of p's class. Undirected pairs are processed in lexicographic
// order, each oriented from the smaller name when that adds neither a cycle nor
// a new v-structure. If that greedy pass fails, Dor-Tarsi is tried; if p has no
// consistent extension at all, the remaining edges are oriented acyclically and
// the result is flagged as forced. `allowed` vetoes individual orientations.
inline Extension consistent_extension(const Pdag& p, const EdgePredicate& allowed = {}) {
  if (auto d = detail::greedy_extension(p, allowed)) return {std::move(*d), false};
  if (auto d = detail::dor_tarsi_extension(p, allowed)) return {std::move(*d), false};
  Dag d = detail::directed_part(p);
  for (const auto& e : detail::lexicographic_undirected(p)) {
    bool placed = false;
    for (auto [x, y] : {std::pair{e.from, e.to}, std::pair{e.to, e.from}})
      if ((!allowed || allowed(x, y)) && d.try_add_edge(x, y)) {
        placed = true;
        break;
      }
    if (!placed && !d.try_add_edge(e.from, e.to)) d.add_edge(e.to, e.from);
  }
  return {std::move(d), true};
}

namespace detail {

inline std::string dot_id(const std::string& s) {
  bool plain = !s.empty() && !std::isdigit(static_cast<unsigned char>(s[0]));
  for (char c : s)
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) plain = false;
  if (plain) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"' || c == '\\') out += '\\';
    out += c;
  }
  return out + "\"";
}

}  // namespace detail

// DOT rendering; undirected edges are written `a -> b [dir=none]`. Edges in
// `highlight` (matched by names, either direction) are drawn in red.
inline std::string to_dot(const Pdag& g, const std::set<NamedEdge>& highlight = {}) {
  using detail::dot_id;
  std::ostringstream os;
  os << "digraph G {\n";
  for (const auto& n : g.nodes()) os << "  " << dot_id(n) << ";\n";
  auto marked = [&](int a, int b) {
    return highlight.count({g.name(a), g.name(b)}) > 0 || highlight.count({g.name(b), g.name(a)}) > 0;
  };
  for (const auto& e : g.directed_edges()) {
    os << "  " << dot_id(g.name(e.from)) << " -> " << dot_id(g.name(e.to));
    if (marked(e.from, e.to)) os << " [color=red]";
    os << ";\n";
  }
  for (const auto& e : g.undirected_edges()) {
    os << "  " << dot_id(g.name(e.from)) << " -> " << dot_id(g.name(e.to)) << " [dir=none";
    if (marked(e.from, e.to)) os << ", color=red";
    os << "];\n";
  }
  os << "}\n";
  return os.str();
}

inline std::string to_dot(const Dag& g, const std::set<NamedEdge>& highlight = {}) {
  return to_dot(Pdag::from_dag(g), highlight);
}

inline nlohmann::json to_json(const Pdag& g) {
  nlohmann::json edges = nlohmann::json::array();
  for (const auto& e : g.directed_edges())
    edges.push_back({{"from", g.name(e.from)}, {"to", g.name(e.to)}, {"directed", true}});
  for (const auto& e : g.undirected_edges())
    edges.push_back({{"from", g.name(e.from)}, {"to", g.name(e.to)}, {"directed", false}});
  return {{"nodes", g.nodes()}, {"edges", edges}};
}

inline nlohmann::json to_json(const Dag& g) { return to_json(Pdag::from_dag(g)); }

inline Pdag pdag_from_json(const nlohmann::json& j) {
  try {
    Pdag p(j.at("nodes").get<std::vector<std::string>>());
    for (const auto& e : j.value("edges", nlohmann::json::array())) {
      auto from = e.at("from").get<std::string>();
      auto to = e.at("to").get<std::string>();
      int a = p.index_of(from), b = p.index_of(to);
      if (p.adjacent(a, b)) throw GraphError("duplicate edge between '" + from + "' and '" + to + "'");
      if (e.value("directed", true))
        p.add_directed(a, b);
      else
        p.add_undirected(a, b);
    }
    return p;
  } catch (const nlohmann::json::exception& ex) {
    throw GraphError(std::string("malformed graph JSON: ") + ex.what());
  }
}

inline Dag dag_from_json(const nlohmann::json& j) {
  Pdag p = pdag_from_json(j);
  if (!p.undirected_edges().empty()) throw GraphError("graph JSON has undirected edges; expected a DAG");
  return detail::directed_part(p);
}

}  // namespace causalbn
