#include <gtest/gtest.h>

#include <random>

#include "repind/constraint.hpp"
#include "repind/entail.hpp"
#include "repind/harness.hpp"

using namespace repind;

namespace {

SpacePtr space_of(std::vector<std::string> symbols, const std::string& restriction = "") {
  return enumerate_worlds(symbols, restriction);
}

Embedding colorful_embedding() {
  auto x = space_of({"colorful"});
  auto y = space_of({"red", "blue", "green"}, "!(red & blue) & !(red & green) & !(blue & green)");
  return from_interpretation({{"colorful", parse_formula("red | blue | green")}}, x, y);
}

}  // namespace

TEST(Harness, TemplatesStayOnTheirSpace) {
  std::mt19937_64 rng(4);
  auto s = random_space(6, rng);
  EXPECT_EQ(s->size(), 6u);
  for (int k = 0; k < 50; ++k) {
    auto c = random_constraint(s, rng, 2);
    EXPECT_TRUE(same_space(c.space(), s));
    auto e = random_event(s, rng);
    EXPECT_FALSE(e.empty());
    EXPECT_FALSE(e.is_all());
  }
  auto hot = one_hot_space("c", 3);
  EXPECT_EQ(hot->size(), 3u);
  EXPECT_EQ(product_decomposition(hot).size(), 1u);
}

TEST(Harness, ColorfulInvariance) {
  auto f = colorful_embedding();
  auto kb = parse_constraint("true", f.source());
  auto theta = parse_constraint("P(colorful) = 1/2", f.source());
  auto m = invariance_check(InferenceProcedure::maxent(), f, kb, theta);
  EXPECT_FALSE(m.ok());
  ASSERT_EQ(m.violations.size(), 1u);
  auto e = invariance_check(InferenceProcedure::entailment(), f, kb, theta);
  EXPECT_TRUE(e.ok());
}

TEST(Harness, FalsifierFindsMaxentAndSparesI1) {
  HarnessConfig cfg;
  cfg.budget = 300;
  cfg.seed = 7;
  auto m = rep_independence_falsify(InferenceProcedure::maxent(), cfg);
  EXPECT_FALSE(m.ok());
  ASSERT_FALSE(m.violations.empty());
  EXPECT_FALSE(m.violations[0].embedding.empty());
  auto i1 = rep_independence_falsify(InferenceProcedure::i1(), cfg);
  EXPECT_TRUE(i1.ok());
  EXPECT_GT(i1.trials, 0u);
}

TEST(Harness, FalsifierIsReplayable) {
  HarnessConfig cfg;
  cfg.budget = 300;
  cfg.seed = 7;
  auto a = rep_independence_falsify(InferenceProcedure::maxent(), cfg);
  auto b = rep_independence_falsify(InferenceProcedure::maxent(), cfg);
  ASSERT_FALSE(a.violations.empty());
  ASSERT_FALSE(b.violations.empty());
  EXPECT_EQ(a.violations[0].trial_seed, b.violations[0].trial_seed);
  EXPECT_EQ(a.violations[0].kb, b.violations[0].kb);
}

TEST(Harness, DisjointCopies) {
  auto g = noindep_gadget();
  EXPECT_TRUE(g.atoms_nonempty);
  auto copies = disjoint_copy_embeddings(g.xx, {g.s_prime}, g.s, 3);
  ASSERT_EQ(copies.size(), 3u);
  for (std::size_t i = 0; i < copies.size(); ++i) {
    EXPECT_TRUE(copies[i].is_faithful());
    EXPECT_TRUE(copies[i].apply(g.s_prime) == copies[0].apply(g.s_prime));
    for (std::size_t j = i + 1; j < copies.size(); ++j)
      EXPECT_TRUE((copies[i].apply(g.s) & copies[j].apply(g.s)).empty());
  }
}

TEST(Harness, RobustnessCatchesMaxent) {
  auto x = space_of({"s"});
  auto y = space_of({"a", "b"});
  auto z = product_space({x, y});
  auto lift = cylinder_embedding(z, 0);
  // T is a single world of Y, so S x Y <=> X x T forces Pr(S) = Pr(T).
  auto psi = parse_constraint("P((s <=> (a & b))) = 1", z);
  auto kb = parse_constraint("true", x);
  auto q = parse_constraint("P(s) = 1/2", x);
  auto r = robustness_check(InferenceProcedure::maxent(), kb, lift, psi, {q});
  EXPECT_EQ(r.conservative.status, Conservativeness::kVerified);
  EXPECT_FALSE(r.skipped);
  EXPECT_FALSE(r.ok());
  auto e = robustness_check(InferenceProcedure::entailment(), kb, lift, psi, {q});
  EXPECT_TRUE(e.ok());
}

TEST(Harness, EssentiallyEntailmentProbe) {
  auto x = space_of({"p"});
  std::vector<Rational> grid = {0, ratio(1, 4), ratio(1, 2), ratio(3, 4), 1};
  std::vector<Event> events = {event_of(x, "p")};
  auto m = essentially_entailment_probe(InferenceProcedure::maxent(), parse_constraint("true", x), events, grid);
  EXPECT_FALSE(m.essentially_entailment());
  bool quarter = false;
  for (const auto& w : m.witnesses) quarter |= (w.alpha == ratio(1, 4) && w.beta == ratio(3, 4));
  EXPECT_TRUE(quarter);
  auto i0 = essentially_entailment_probe(InferenceProcedure::i0(), parse_constraint("true", x), events, grid);
  EXPECT_TRUE(i0.only_unit_interval());
  EXPECT_FALSE(i0.witnesses.empty());
}

TEST(Harness, AlmostTrivialGadgetCounts) {
  auto g = almosttrivial2_gadget(3, 2);
  EXPECT_EQ(g.worlds, 6u);
  EXPECT_EQ(g.u_size, 4u);
  EXPECT_EQ(g.pair_size, 2u);
  EXPECT_EQ(g.gamma, ratio(1, 4));
  EXPECT_EQ(g.alpha, ratio(5, 6));
  EXPECT_TRUE(g.ok());
  EXPECT_THROW(almosttrivial2_gadget(3, 3), Error);
}

TEST(Harness, SigmaExtensionIsExact) {
  auto x = space_of({"x"});
  ExactMeasure nu(x, {ratio(2, 5), ratio(3, 5)});
  auto r = sigma_extension_check(3, 2, ratio(1, 4), nu, 0);
  EXPECT_TRUE(r.ok());
  EXPECT_GT(r.z_worlds, 0u);
}

TEST(Harness, BootstrapUniform) {
  auto x = space_of({"p"});
  auto y = space_of({"a", "b"});
  // Equal fibres: a alone decides p.
  auto even = from_interpretation({{"p", parse_formula("a")}}, x, y);
  std::vector<std::pair<Constraint, Constraint>> corpus = {
      {parse_constraint("P(p) >= 1/3", x), parse_constraint("P(p) = 1/2", x)}};
  auto good = bootstrap_check({Measure::uniform(x)}, {Measure::uniform(y)}, even, corpus);
  EXPECT_TRUE(good.corresponding);
  EXPECT_TRUE(good.invariance.ok());
  EXPECT_TRUE(good.biconditional_holds());

  auto f = colorful_embedding();
  auto bad = bootstrap_check({Measure::uniform(f.source())}, {Measure::uniform(f.target())}, f, {});
  EXPECT_FALSE(bad.corresponding);
  EXPECT_FALSE(bad.invariance.ok());
  EXPECT_TRUE(bad.biconditional_holds());
}

TEST(Harness, ProductsSmall) {
  HarnessConfig cfg;
  cfg.seed = 1;
  cfg.budget = 200;
  auto r = products_invariance_check(10, 5, cfg);
  EXPECT_EQ(r.product_embeddings, 10u);
  EXPECT_EQ(r.permutation_embeddings, 5u);
  EXPECT_GT(r.pairs, 0u);
  EXPECT_TRUE(r.violations.empty());
  EXPECT_TRUE(r.crossing_violation_found);
}

TEST(Harness, KlmCorpusShape) {
  auto c = random_klm_corpus(50, 2);
  EXPECT_GE(c.kbs.size(), 50u);
  EXPECT_EQ(c.spaces.size(), 3u);
  EXPECT_EQ(c.thetas.size(), 18u);
  auto again = random_klm_corpus(50, 2);
  ASSERT_EQ(again.kbs.size(), c.kbs.size());
  for (std::size_t i = 0; i < c.kbs.size(); ++i) EXPECT_EQ(c.kbs[i].to_string(), again.kbs[i].to_string());
}
