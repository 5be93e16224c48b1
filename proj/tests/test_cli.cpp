#include <gtest/gtest.h>

#include <fstream>
#include <string>

#include "reproduce.hpp"
#include "scenario.hpp"

using namespace repind;
using namespace repind::cli;

namespace {

const std::string kData = REPIND_DATA_DIR;

json load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return json::parse(in);
}

json scenario_file(const std::string& name) { return load(kData + "/scenarios/" + name + ".json"); }

std::string pointer_of(const json& j) {
  try {
    build(scenario_from_json(j));
  } catch (const ValidationError& e) {
    return e.pointer();
  }
  return "";
}

}  // namespace

TEST(Cli, ScenarioRoundTrip) {
  for (const char* name : {"flying-bird-4", "flying-bird-3", "colorful", "colorful-entailment", "product",
                           "unsatisfiable", "invalid", "unfaithful"}) {
    auto s = scenario_from_json(scenario_file(name));
    auto again = scenario_from_json(to_json(s));
    EXPECT_EQ(s, again) << name;
  }
}

TEST(Cli, BuildsValidScenarios) {
  auto b = build(scenario_from_json(scenario_file("colorful")));
  ASSERT_TRUE(b.kb.has_value());
  ASSERT_TRUE(b.procedure.has_value());
  ASSERT_EQ(b.embeddings.size(), 1u);
  EXPECT_TRUE(b.embeddings[0].is_faithful());
  auto p = build(scenario_from_json(scenario_file("product")));
  ASSERT_EQ(p.embeddings.size(), 1u);
  EXPECT_EQ(p.procedure->kind(), InferenceProcedure::Kind::kPriorBased);
}

TEST(Cli, UnknownSymbolIsLocated) {
  EXPECT_EQ(pointer_of(scenario_file("invalid")), "/queries/0");
}

TEST(Cli, ShapeErrorsAreLocated) {
  json j = scenario_file("flying-bird-4");
  j["surprise"] = 1;
  EXPECT_THROW(scenario_from_json(j), ValidationError);

  json k = scenario_file("flying-bird-4");
  k["procedure"]["kind"] = "oracle";
  EXPECT_EQ(pointer_of(k), "/procedure/kind");

  json m = scenario_file("unfaithful");
  m["embeddings"][0]["map"]["p"] = "r &";
  EXPECT_EQ(pointer_of(m), "/embeddings/0/map/p");

  json n = scenario_file("flying-bird-4");
  n["kb"] = 3;
  EXPECT_THROW(scenario_from_json(n), ValidationError);
}

TEST(Cli, PointerTokensAreEscaped) {
  EXPECT_EQ(pointer_token("a/b"), "a~1b");
  EXPECT_EQ(pointer_token("m~n"), "m~0n");
  EXPECT_EQ(pointer_token("plain"), "plain");
}

TEST(Cli, GoldenDiffTolerance) {
  json a = {{"p", 0.5}, {"exact", "1/2"}, {"list", {1, 2}}};
  json b = a;
  b["p"] = 0.5 + 1e-8;
  EXPECT_TRUE(golden_diff(a, b).empty());
  b["p"] = 0.51;
  EXPECT_EQ(golden_diff(a, b).size(), 1u);
  json c = a;
  c["exact"] = "0.5";
  EXPECT_FALSE(golden_diff(a, c).empty());
  json d = a;
  d["list"] = {1, 2, 3};
  EXPECT_FALSE(golden_diff(a, d).empty());
  json e = a;
  e.erase("exact");
  EXPECT_FALSE(golden_diff(a, e).empty());
}

TEST(Cli, ReproductionsMatchGoldens) {
  for (const auto& name : reproduction_names()) {
    auto fresh = reproduce(name, {});
    auto golden = load(kData + "/golden/" + name + ".json");
    auto diffs = golden_diff(golden, fresh);
    EXPECT_TRUE(diffs.empty()) << name << ": " << (diffs.empty() ? "" : diffs.front());
  }
  EXPECT_THROW(reproduce("no-such-thing", {}), ValidationError);
}
