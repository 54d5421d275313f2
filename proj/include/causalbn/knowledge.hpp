#pragma once

// Knowledge-based constraints: required edges, forbidden edges, temporal
// tiers and orientation preferences, plus their expansion into an
// index-level mask used by every learner.

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "causalbn/dataset.hpp"
#include "causalbn/error.hpp"
#include "causalbn/graph.hpp"

namespace causalbn {

struct Tier {
  int level = 1;
  std::vector<std::string> variables;
  bool intra_tier_edges = true;
};

struct OrientationPreference {
  std::string a;
  std::string b;
  bool a_to_b = true;  // false means b -> a is preferred
};

struct KnowledgeConstraints {
  std::vector<NamedEdge> required;
  std::vector<NamedEdge> forbidden;
  std::vector<Tier> tiers;
  std::vector<OrientationPreference> orientation_preferences;

  bool empty() const {
    return required.empty() && forbidden.empty() && tiers.empty() && orientation_preferences.empty();
  }

  // Preferred orientation for the pair {a, b}, if one was declared.
  std::optional<NamedEdge> preferred(const std::string& a, const std::string& b) const {
    for (const auto& p : orientation_preferences) {
      if ((p.a == a && p.b == b) || (p.a == b && p.b == a))
        return p.a_to_b ? NamedEdge{p.a, p.b} : NamedEdge{p.b, p.a};
    }
    return std::nullopt;
  }
};

struct Diagnostics {
  std::vector<std::string> messages;
  bool ok() const { return messages.empty(); }
  std::string summary() const {
    std::string s;
    for (const auto& m : messages) s += (s.empty() ? "" : "; ") + m;
    return s;
  }
};

// Forbidden directed edges implied by the tiers, unioned with the explicit
// forbidden list. Untiered variables form an implicit last tier whose
// members may cause each other.
inline std::set<NamedEdge> expand_tiers(const KnowledgeConstraints& k, const std::vector<std::string>& all_variables) {
  std::map<std::string, std::pair<int, bool>> tier_of;  // name -> (level, intra allowed)
  int last = 0;
  for (const auto& t : k.tiers) {
    last = std::max(last, t.level);
    for (const auto& v : t.variables) {
      if (std::find(all_variables.begin(), all_variables.end(), v) == all_variables.end())
        throw ConstraintError("tier " + std::to_string(t.level) + " lists unknown variable '" + v + "'");
      tier_of[v] = {t.level, t.intra_tier_edges};
    }
  }
  std::set<NamedEdge> out(k.forbidden.begin(), k.forbidden.end());
  if (k.tiers.empty()) return out;
  auto info = [&](const std::string& v) {
    auto it = tier_of.find(v);
    return it == tier_of.end() ? std::pair<int, bool>{last + 1, true} : it->second;
  };
  for (const auto& from : all_variables)
    for (const auto& to : all_variables) {
      if (from == to) continue;
      auto [lf, intra_f] = info(from);
      auto [lt, intra_t] = info(to);
      if (lf > lt || (lf == lt && !intra_f)) out.emplace(from, to);
    }
  return out;
}

namespace detail {

inline bool has_cycle(const std::vector<NamedEdge>& edges) {
  std::set<std::string> names;
  for (const auto& [a, b] : edges) {
    names.insert(a);
    names.insert(b);
  }
  Dag g(std::vector<std::string>(names.begin(), names.end()));
  for (const auto& [a, b] : edges) {
    if (a == b) return true;
    if (!g.has_edge(a, b) && !g.try_add_edge(g.index_of(a), g.index_of(b))) return true;
  }
  return false;
}

}  // namespace detail

// Checks that don't need the variable list: self-loops, required/forbidden
// overlap, cycles among required edges, overlapping tiers.
inline Diagnostics validate_structure(const KnowledgeConstraints& k) {
  Diagnostics diag;
  for (const auto& [a, b] : k.required)
    if (a == b) diag.messages.push_back("required self-loop on '" + a + "'");
  for (const auto& [a, b] : k.forbidden)
    if (a == b) diag.messages.push_back("forbidden self-loop on '" + a + "'");
  std::set<NamedEdge> forbidden(k.forbidden.begin(), k.forbidden.end());
  for (const auto& e : k.required)
    if (forbidden.count(e)) diag.messages.push_back("edge " + e.first + " -> " + e.second + " is both required and forbidden");
  if (detail::has_cycle(k.required)) diag.messages.push_back("required edges contain a cycle");
  std::map<std::string, int> seen;
  for (const auto& t : k.tiers)
    for (const auto& v : t.variables) {
      auto [it, fresh] = seen.emplace(v, t.level);
      if (!fresh) diag.messages.push_back("variable '" + v + "' appears in more than one tier");
    }
  return diag;
}

// Full validation against the variables of a dataset; diagnostics are
// returned, never thrown.
inline Diagnostics validate(const KnowledgeConstraints& k, const std::vector<std::string>& all_variables) {
  Diagnostics diag = validate_structure(k);
  auto known = [&](const std::string& v) {
    return std::find(all_variables.begin(), all_variables.end(), v) != all_variables.end();
  };
  std::set<std::string> unknown;
  for (const auto& [a, b] : k.required) {
    if (!known(a)) unknown.insert(a);
    if (!known(b)) unknown.insert(b);
  }
  for (const auto& [a, b] : k.forbidden) {
    if (!known(a)) unknown.insert(a);
    if (!known(b)) unknown.insert(b);
  }
  for (const auto& t : k.tiers)
    for (const auto& v : t.variables)
      if (!known(v)) unknown.insert(v);
  for (const auto& p : k.orientation_preferences) {
    if (!known(p.a)) unknown.insert(p.a);
    if (!known(p.b)) unknown.insert(p.b);
  }
  for (const auto& v : unknown) diag.messages.push_back("unknown variable '" + v + "'");
  if (!unknown.empty()) return diag;

  auto expanded = expand_tiers(k, all_variables);
  std::set<NamedEdge> explicit_forbidden(k.forbidden.begin(), k.forbidden.end());
  for (const auto& e : k.required)
    if (expanded.count(e) && !explicit_forbidden.count(e))
      diag.messages.push_back("required edge " + e.first + " -> " + e.second + " violates the temporal tiers");
  return diag;
}

// Index-level view of validated constraints over an ordered variable list.
class ConstraintMask {
 public:
  ConstraintMask() = default;

  ConstraintMask(const KnowledgeConstraints& k, const std::vector<std::string>& names)
      : names_(names), required_(names.size() * names.size(), 0), forbidden_(names.size() * names.size(), 0) {
    auto diag = validate(k, names);
    if (!diag.ok()) throw ConstraintError("invalid constraints: " + diag.summary());
    auto idx = [&](const std::string& v) {
      return static_cast<std::size_t>(std::find(names.begin(), names.end(), v) - names.begin());
    };
    for (const auto& [a, b] : k.required) required_[idx(a) * size() + idx(b)] = 1;
    for (const auto& [a, b] : expand_tiers(k, names)) forbidden_[idx(a) * size() + idx(b)] = 1;
  }

  // Unconstrained mask over n variables.
  static ConstraintMask none(const std::vector<std::string>& names) { return ConstraintMask(KnowledgeConstraints{}, names); }

  std::size_t size() const { return names_.size(); }
  const std::vector<std::string>& names() const { return names_; }

  bool required(int from, int to) const { return required_[at(from, to)] != 0; }
  bool forbidden(int from, int to) const { return forbidden_[at(from, to)] != 0; }
  bool allowed(int from, int to) const { return !forbidden(from, to); }
  // Either orientation of {a, b} required.
  bool pair_required(int a, int b) const { return required(a, b) || required(b, a); }
  // Neither orientation of {a, b} may appear.
  bool pair_forbidden(int a, int b) const { return forbidden(a, b) && forbidden(b, a); }

  std::vector<Edge> required_edges() const {
    std::vector<Edge> out;
    for (int a = 0; a < static_cast<int>(size()); ++a)
      for (int b = 0; b < static_cast<int>(size()); ++b)
        if (required(a, b)) out.push_back({a, b});
    return out;
  }

  EdgePredicate predicate() const {
    return [mask = *this](int from, int to) { return mask.allowed(from, to); };
  }

  // True when g contains every required edge and no forbidden one.
  bool satisfied_by(const Dag& g) const {
    for (int a = 0; a < static_cast<int>(size()); ++a)
      for (int b = 0; b < static_cast<int>(size()); ++b) {
        if (required(a, b) && !g.has_edge(a, b)) return false;
        if (forbidden(a, b) && g.has_edge(a, b)) return false;
      }
    return true;
  }

 private:
  std::size_t at(int a, int b) const { return static_cast<std::size_t>(a) * size() + static_cast<std::size_t>(b); }

  std::vector<std::string> names_;
  std::vector<std::uint8_t> required_;
  std::vector<std::uint8_t> forbidden_;
};

namespace detail {

inline NamedEdge edge_from_json(const nlohmann::json& e, const std::string& where, std::size_t i) {
  if (!e.is_object() || !e.contains("from") || !e.contains("to") || !e["from"].is_string() || !e["to"].is_string())
    throw ConstraintError("malformed " + where + " entry #" + std::to_string(i) + ": " + e.dump());
  return {e["from"].get<std::string>(), e["to"].get<std::string>()};
}

}  // namespace detail

inline KnowledgeConstraints constraints_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConstraintError("constraint file must hold a JSON object");
  KnowledgeConstraints k;
  auto list = [&](const char* key) {
    if (!j.contains(key)) return nlohmann::json::array();
    if (!j[key].is_array()) throw ConstraintError(std::string("'") + key + "' must be an array");
    return j[key];
  };
  std::size_t i = 0;
  for (const auto& e : list("required")) k.required.push_back(detail::edge_from_json(e, "required", i++));
  i = 0;
  for (const auto& e : list("forbidden")) k.forbidden.push_back(detail::edge_from_json(e, "forbidden", i++));
  i = 0;
  for (const auto& t : list("tiers")) {
    if (!t.is_object() || !t.contains("variables") || !t["variables"].is_array())
      throw ConstraintError("malformed tiers entry #" + std::to_string(i) + ": " + t.dump());
    Tier tier;
    tier.level = t.value("level", static_cast<int>(i) + 1);
    tier.variables = t["variables"].get<std::vector<std::string>>();
    tier.intra_tier_edges = t.value("intra_tier_edges", true);
    k.tiers.push_back(std::move(tier));
    ++i;
  }
  i = 0;
  for (const auto& p : list("orientation_preferences")) {
    if (!p.is_object() || !p.contains("a") || !p.contains("b") || !p.contains("prefer"))
      throw ConstraintError("malformed orientation_preferences entry #" + std::to_string(i) + ": " + p.dump());
    OrientationPreference pref{p["a"].get<std::string>(), p["b"].get<std::string>(), true};
    auto dir = p["prefer"].get<std::string>();
    if (dir == "a->b")
      pref.a_to_b = true;
    else if (dir == "b->a")
      pref.a_to_b = false;
    else
      throw ConstraintError("orientation_preferences entry #" + std::to_string(i) + " has prefer '" + dir +
                            "' (expected \"a->b\" or \"b->a\")");
    k.orientation_preferences.push_back(pref);
    ++i;
  }
  std::sort(k.tiers.begin(), k.tiers.end(), [](const Tier& a, const Tier& b) { return a.level < b.level; });
  return k;
}

inline nlohmann::json to_json(const KnowledgeConstraints& k) {
  auto edges = [](const std::vector<NamedEdge>& es) {
    nlohmann::json a = nlohmann::json::array();
    for (const auto& [f, t] : es) a.push_back({{"from", f}, {"to", t}});
    return a;
  };
  nlohmann::json tiers = nlohmann::json::array();
  for (const auto& t : k.tiers)
    tiers.push_back({{"level", t.level}, {"variables", t.variables}, {"intra_tier_edges", t.intra_tier_edges}});
  nlohmann::json prefs = nlohmann::json::array();
  for (const auto& p : k.orientation_preferences)
    prefs.push_back({{"a", p.a}, {"b", p.b}, {"prefer", p.a_to_b ? "a->b" : "b->a"}});
  return {{"required", edges(k.required)},
          {"forbidden", edges(k.forbidden)},
          {"tiers", tiers},
          {"orientation_preferences", prefs}};
}

// Parses and structurally validates a constraint file.
inline KnowledgeConstraints load_constraints(const std::string& path) {
  nlohmann::json j;
  try {
    j = read_json_file(path);
  } catch (const DataError& e) {
    throw ConstraintError(e.what());
  }
  auto k = constraints_from_json(j);
  auto diag = validate_structure(k);
  if (!diag.ok()) throw ConstraintError("invalid constraints in '" + path + "': " + diag.summary());
  return k;
}

}  // namespace causalbn
