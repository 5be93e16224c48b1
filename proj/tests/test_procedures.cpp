#include <gtest/gtest.h>

#include "repind/constraint.hpp"
#include "repind/entail.hpp"
#include "repind/harness.hpp"
#include "repind/procedures.hpp"

using namespace repind;

namespace {

SpacePtr space_of(std::vector<std::string> symbols, const std::string& restriction = "") {
  return enumerate_worlds(symbols, restriction);
}

bool holds(const InferenceProcedure& p, const SpacePtr& s, const std::string& kb, const std::string& theta) {
  return infers(p, parse_constraint(kb, s), parse_constraint(theta, s)).holds;
}

}  // namespace

TEST(Procedures, EntailmentMatchesEntails) {
  auto s = space_of({"p", "q"});
  auto e = InferenceProcedure::entailment();
  EXPECT_TRUE(holds(e, s, "P(p) >= 1/2", "P((p | q)) >= 1/2"));
  EXPECT_FALSE(holds(e, s, "P(p) >= 1/2", "P(q) >= 1/2"));
  EXPECT_FALSE(holds(e, s, "true", "P(p) = 1/2"));
}

TEST(Procedures, MaxentBirds) {
  auto four = space_of({"flying-bird", "bird"});
  auto three = space_of({"flying-bird", "bird"}, "flying-bird => bird");
  auto m = InferenceProcedure::maxent();
  EXPECT_TRUE(holds(m, four, "true", "P(bird) = 1/2"));
  EXPECT_TRUE(holds(m, three, "true", "P(bird) = 2/3"));
  EXPECT_FALSE(holds(m, three, "true", "P(bird) = 1/2"));
}

TEST(Procedures, MaxentOutsideDomainThrows) {
  auto s = space_of({"x1"});
  EXPECT_THROW(infers(InferenceProcedure::maxent(), parse_constraint("P(x1) < 1/2", s),
                      parse_constraint("true", s)),
               DomainError);
  EXPECT_NO_THROW(infers(InferenceProcedure::maxent(), parse_constraint("P(x1) < 2/3", s),
                         parse_constraint("true", s)));
}

TEST(Procedures, UnsatisfiableKbInfersEverything) {
  auto s = space_of({"p"});
  for (auto p : {InferenceProcedure::entailment(), InferenceProcedure::maxent(), InferenceProcedure::i0(),
                 InferenceProcedure::i1()})
    EXPECT_TRUE(holds(p, s, "P(p) > 1", "P(p) = 1/3")) << p.name();
}

TEST(Procedures, I0SelectsFullSupportOnObjectiveKbs) {
  auto s = space_of({"p", "q"});
  auto sel = i0_select(parse_constraint("P(p) = 1", s));
  EXPECT_FALSE(sel.empty);
  auto i0 = InferenceProcedure::i0();
  EXPECT_TRUE(holds(i0, s, "P(p) = 1", "P(q) > 0 & P(q) < 1"));
  EXPECT_FALSE(holds(InferenceProcedure::entailment(), s, "P(p) = 1", "P(q) > 0"));
  EXPECT_TRUE(holds(i0, s, "true", "P(p) > 0 & P(p) < 1"));
  EXPECT_FALSE(holds(i0, s, "true", "P(p) >= 1/2"));
  // Non-objective kbs are left alone.
  EXPECT_TRUE(holds(i0, s, "P(p) >= 1/2", "P(p) >= 1/2"));
  EXPECT_FALSE(holds(i0, s, "P(p) >= 1/2", "P(p) > 1/2"));
}

TEST(Procedures, I1StrengthensQuarterBounds) {
  auto s = space_of({"s"});
  auto i1 = InferenceProcedure::i1();
  EXPECT_TRUE(holds(i1, s, "P(s) >= 1/4", "P(s) >= 1/3"));
  EXPECT_FALSE(holds(InferenceProcedure::entailment(), s, "P(s) >= 1/4", "P(s) >= 1/3"));
  EXPECT_FALSE(holds(i1, s, "P(s) >= 1/5", "P(s) >= 1/3"));
  auto sel = i1_select(parse_constraint("P(s) >= 1/4", s));
  ASSERT_TRUE(sel.constraint.has_value());
  EXPECT_TRUE(equivalent(*sel.constraint, parse_constraint("P(s) >= 1/3", s)));
}

TEST(Procedures, PriorBasedUniformIsMaxentOnFreeKbs) {
  auto s = space_of({"a", "b"});
  auto ip = InferenceProcedure::prior_based(PriorFunction::uniform());
  EXPECT_TRUE(holds(ip, s, "P(a) = 1/5", "P(a & b) = 1/10"));
  EXPECT_TRUE(holds(ip, s, "true", "P(a) = 1/2"));
}

TEST(Procedures, FinitePriorTable) {
  auto s = space_of({"a"});
  auto t = space_of({"b"});
  PriorFunction pf = PriorFunction::finite({{s, {Measure(s, {0.25, 0.75})}}});
  EXPECT_EQ(pf.priors(s).size(), 1u);
  EXPECT_THROW(pf.priors(t), DomainError);
  auto ip = InferenceProcedure::prior_based(pf);
  EXPECT_TRUE(holds(ip, s, "true", "P(a) = 3/4"));
  EXPECT_THROW(PriorFunction::product_family().priors(s), Error);
}

TEST(Procedures, BrokenProcedureFailsReflexivity) {
  auto corpus = random_klm_corpus(20, 3);
  auto report = klm_properties_check(broken_procedure(1), corpus.kbs, corpus.thetas);
  EXPECT_FALSE(report.holds("reflexivity"));
}

TEST(Procedures, KlmHoldsForEntailmentAndMaxent) {
  auto corpus = random_klm_corpus(20, 11);
  for (auto p : {InferenceProcedure::entailment(), InferenceProcedure::maxent()}) {
    auto report = klm_properties_check(p, corpus.kbs, corpus.thetas);
    EXPECT_TRUE(report.all_hold()) << p.name();
    for (const auto& prop : kKlmProperties) EXPECT_GT(report.checks[prop], 0u) << prop;
  }
}

TEST(Procedures, MinimalDefaultIndependence) {
  auto x = space_of({"s"});
  auto kb = parse_constraint("P(s) >= 1/4", x);
  auto s = event_of(x, "s");
  auto y = space_of({"t"});
  auto t = event_of(y, "t");
  EXPECT_TRUE(minimal_default_independence_check(InferenceProcedure::maxent(), kb, s, t).holds);
  EXPECT_FALSE(minimal_default_independence_check(InferenceProcedure::entailment(), kb, s, t).holds);
}

TEST(Procedures, ProductPriorFactorises) {
  auto ab = space_of({"a", "b"});
  std::vector<Constraint> kbs = {parse_constraint("P(a) = 3/10", ab), parse_constraint("P(b) = 3/5", ab)};
  EXPECT_TRUE(factorize(parse_constraint("P(a) = 3/10 & P(b) = 3/5", ab)).has_value());
  EXPECT_FALSE(factorize(parse_constraint("P(a & b) = 1/5", ab)).has_value());
  EXPECT_TRUE(product_prior_infer(kbs, parse_constraint("P(a & b) = 9/50", ab)).holds);
  EXPECT_FALSE(product_prior_infer(kbs, parse_constraint("P(a & b) = 1/5", ab)).holds);
}
