#include <gtest/gtest.h>

#include <fstream>
#include <set>

#include "causalbn/knowledge.hpp"
#include "causalbn/synth.hpp"
#include "fixtures.hpp"

using namespace causalbn;

namespace {

std::set<NamedEdge> all_ordered_pairs(const std::vector<std::string>& vars) {
  std::set<NamedEdge> out;
  for (const auto& a : vars)
    for (const auto& b : vars)
      if (a != b) out.emplace(a, b);
  return out;
}

bool mentions(const Diagnostics& d, const std::string& word) {
  return d.summary().find(word) != std::string::npos;
}

std::string write_temp(const std::string& name, const std::string& text) {
  std::string path = ::testing::TempDir() + name;
  std::ofstream(path) << text;
  return path;
}

}  // namespace

TEST(ExpandTiers, TwoTierExample) {
  KnowledgeConstraints k;
  k.tiers = {{1, {"Age", "Sex"}, false}, {2, {"X"}, true}};
  auto f = expand_tiers(k, {"Age", "Sex", "X"});
  EXPECT_EQ(f, (std::set<NamedEdge>{{"X", "Age"}, {"X", "Sex"}, {"Age", "Sex"}, {"Sex", "Age"}}));
}

TEST(ExpandTiers, FirstTierHasNoCause) {
  auto k = sepsis_constraints();
  std::vector<std::string> vars;
  for (const auto& v : sepsis_variables()) vars.push_back(v.name);
  auto f = expand_tiers(k, vars);
  const std::set<std::string> tier1{"Age", "Gender", "Ethnic Group"};
  for (const auto& from : vars)
    for (const auto& to : tier1) {
      if (from != to) {
        EXPECT_TRUE(f.count({from, to})) << from << " -> " << to;
      }
    }
  // Nothing else is forbidden.
  EXPECT_EQ(f.size(), (vars.size() - 1) * 3);
}

TEST(ExpandTiers, SingleOpenTierForbidsNothing) {
  KnowledgeConstraints k;
  k.tiers = {{1, {"A", "B", "C"}, true}};
  EXPECT_TRUE(expand_tiers(k, {"A", "B", "C"}).empty());
}

TEST(ExpandTiers, MatchesRuleEnumeration) {
  // Brute force: an edge is forbidden iff its source sits in a strictly later
  // tier than its target, or both share a closed tier, or it was listed.
  KnowledgeConstraints k;
  k.tiers = {{1, {"A", "B"}, false}, {2, {"C", "D"}, true}, {3, {"E"}, false}};
  k.forbidden = {{"F", "G"}};
  std::vector<std::string> vars{"A", "B", "C", "D", "E", "F", "G"};
  std::map<std::string, int> level{{"A", 1}, {"B", 1}, {"C", 2}, {"D", 2}, {"E", 3}, {"F", 4}, {"G", 4}};
  std::set<int> closed{1, 3};
  std::set<NamedEdge> expected;
  for (const auto& [a, b] : all_ordered_pairs(vars))
    if (level[a] > level[b] || (level[a] == level[b] && closed.count(level[a])) || (a == "F" && b == "G"))
      expected.emplace(a, b);
  EXPECT_EQ(expand_tiers(k, vars), expected);
}

TEST(ExpandTiers, UnknownTierVariable) {
  KnowledgeConstraints k;
  k.tiers = {{1, {"Nope"}, false}};
  EXPECT_THROW(expand_tiers(k, {"A"}), ConstraintError);
}

TEST(ExpandTiers, NeverContainsARequiredEdgeOfValidConstraints) {
  auto k = sepsis_constraints();
  std::vector<std::string> vars;
  for (const auto& v : sepsis_variables()) vars.push_back(v.name);
  ASSERT_TRUE(validate(k, vars).ok());
  auto f = expand_tiers(k, vars);
  for (const auto& e : k.required) EXPECT_FALSE(f.count(e));
}

TEST(Validate, Examples) {
  auto k = sepsis_constraints();
  k.tiers.clear();
  std::vector<std::string> vars;
  for (const auto& v : sepsis_variables()) vars.push_back(v.name);
  EXPECT_TRUE(validate(k, vars).ok()) << validate(k, vars).summary();

  KnowledgeConstraints both;
  both.required = {{"A", "B"}};
  both.forbidden = {{"A", "B"}};
  auto d = validate(both, {"A", "B"});
  EXPECT_FALSE(d.ok());
  EXPECT_TRUE(mentions(d, "required and forbidden"));

  KnowledgeConstraints cyc;
  cyc.required = {{"A", "B"}, {"B", "A"}};
  EXPECT_TRUE(mentions(validate(cyc, {"A", "B"}), "cycle"));
}

TEST(Validate, ReportsUnknownVariablesTierConflictsAndOverlaps) {
  KnowledgeConstraints k;
  k.required = {{"A", "Q"}};
  EXPECT_TRUE(mentions(validate(k, {"A", "B"}), "'Q'"));

  KnowledgeConstraints tiered;
  tiered.tiers = {{1, {"Age"}, false}};
  tiered.required = {{"X", "Age"}};
  EXPECT_TRUE(mentions(validate(tiered, {"Age", "X"}), "tiers"));

  KnowledgeConstraints overlap;
  overlap.tiers = {{1, {"A"}, false}, {2, {"A"}, true}};
  EXPECT_TRUE(mentions(validate(overlap, {"A"}), "more than one tier"));
}

TEST(LoadConstraints, ShippedFile) {
  auto k = load_constraints(fixture::data_path("sepsis_constraints.json"));
  EXPECT_EQ(k.required.size(), 21u);
  ASSERT_EQ(k.tiers.size(), 1u);
  EXPECT_EQ(std::set<std::string>(k.tiers[0].variables.begin(), k.tiers[0].variables.end()),
            (std::set<std::string>{"Age", "Gender", "Ethnic Group"}));
  EXPECT_FALSE(k.tiers[0].intra_tier_edges);
  EXPECT_EQ(k.required, sepsis_required_edges());
  std::vector<std::string> vars;
  for (const auto& v : sepsis_variables()) vars.push_back(v.name);
  EXPECT_TRUE(validate(k, vars).ok());
}

TEST(LoadConstraints, EmptyObjectAndErrors) {
  EXPECT_TRUE(load_constraints(write_temp("empty.json", "{}")).empty());
  try {
    load_constraints(write_temp("bad.json", R"({"required":[{"from":"A","to":"B"},{"from":"A"}]})"));
    FAIL();
  } catch (const ConstraintError& e) {
    EXPECT_NE(std::string(e.what()).find("#1"), std::string::npos);
  }
  EXPECT_THROW(load_constraints(write_temp("broken.json", "{not json")), ConstraintError);
  EXPECT_THROW(load_constraints(write_temp("cycle.json",
                                           R"({"required":[{"from":"A","to":"B"},{"from":"B","to":"A"}]})")),
               ConstraintError);
  EXPECT_THROW(constraints_from_json(nlohmann::json::parse(
                   R"({"orientation_preferences":[{"a":"A","b":"B","prefer":"sideways"}]})")),
               ConstraintError);
}

TEST(LoadConstraints, JsonRoundTrip) {
  KnowledgeConstraints k;
  k.required = {{"A", "B"}};
  k.forbidden = {{"C", "A"}};
  k.tiers = {{1, {"A"}, false}};
  k.orientation_preferences = {{"B", "C", false}};
  auto back = constraints_from_json(to_json(k));
  EXPECT_EQ(to_json(back), to_json(k));
  EXPECT_EQ(back.preferred("C", "B"), (NamedEdge{"C", "B"}));
  EXPECT_FALSE(back.preferred("A", "C").has_value());
}

TEST(ConstraintMask, IndexView) {
  KnowledgeConstraints k;
  k.required = {{"B", "C"}};
  k.forbidden = {{"A", "C"}};
  k.tiers = {{1, {"A"}, true}};
  ConstraintMask m(k, {"A", "B", "C"});
  EXPECT_TRUE(m.required(1, 2));
  EXPECT_TRUE(m.pair_required(2, 1));
  EXPECT_TRUE(m.forbidden(0, 2));
  EXPECT_TRUE(m.forbidden(2, 0));
  EXPECT_TRUE(m.pair_forbidden(0, 2));
  EXPECT_FALSE(m.pair_forbidden(0, 1));
  EXPECT_TRUE(m.allowed(0, 1));
  EXPECT_FALSE(m.allowed(1, 0));
  EXPECT_TRUE(m.satisfied_by(Dag({"A", "B", "C"}, {{"A", "B"}, {"B", "C"}})));
  EXPECT_FALSE(m.satisfied_by(Dag({"A", "B", "C"}, {{"A", "B"}})));
  EXPECT_FALSE(m.satisfied_by(Dag({"A", "B", "C"}, {{"B", "C"}, {"B", "A"}})));
  KnowledgeConstraints bad;
  bad.required = {{"A", "Z"}};
  EXPECT_THROW(ConstraintMask(bad, {"A", "B"}), ConstraintError);
}
