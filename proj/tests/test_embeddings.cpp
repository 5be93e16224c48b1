#include <gtest/gtest.h>

#include <random>
#include <set>

#include "repind/constraint.hpp"
#include "repind/embedding.hpp"
#include "repind/entail.hpp"
#include "repind/measure.hpp"
#include "repind/measure_set.hpp"

using namespace repind;

namespace {

SpacePtr space_of(std::vector<std::string> symbols, const std::string& restriction = "") {
  return enumerate_worlds(symbols, restriction);
}

SpacePtr colors() {
  return space_of({"red", "blue", "green"}, "!(red & blue) & !(red & green) & !(blue & green)");
}

Event subset(const SpacePtr& s, unsigned mask) {
  Event::Bits b(s->size());
  for (std::size_t i = 0; i < s->size(); ++i)
    if (mask >> i & 1u) b.set(i);
  return Event(s, b);
}

// Oracle: S subset T iff f(S) subset f(T), over every pair of source events.
bool faithful_by_enumeration(const Embedding& f) {
  const auto n = f.source()->size();
  for (unsigned a = 0; a < (1u << n); ++a)
    for (unsigned b = 0; b < (1u << n); ++b) {
      Event s = subset(f.source(), a), t = subset(f.source(), b);
      if (s.subset_of(t) != f.apply(s).subset_of(f.apply(t))) return false;
    }
  return true;
}

// Oracle: f preserves complement, union and intersection on event pairs;
// every pair for small sources, a seeded sample otherwise.
bool homomorphism_by_enumeration(const Embedding& f) {
  const auto n = f.source()->size();
  std::vector<unsigned> masks;
  if (n <= 4) {
    for (unsigned a = 0; a < (1u << n); ++a) masks.push_back(a);
  } else {
    std::mt19937 rng(17);
    for (int k = 0; k < 40; ++k) masks.push_back(rng() & ((1u << n) - 1));
  }
  for (unsigned a : masks) {
    Event s = subset(f.source(), a);
    if (!(f.apply(~s) == ~f.apply(s))) return false;
    for (unsigned b : masks) {
      Event t = subset(f.source(), b);
      if (!(f.apply(s | t) == (f.apply(s) | f.apply(t)))) return false;
      if (!(f.apply(s & t) == (f.apply(s) & f.apply(t)))) return false;
    }
  }
  return true;
}

}  // namespace

TEST(Embedding, SurjectionColorful) {
  auto x = space_of({"colorful"});
  auto y = space_of({"red", "blue", "green", "colorful"});
  // Y-world y goes to the colorful bit.
  std::vector<std::size_t> g(y->size());
  for (std::size_t w = 0; w < y->size(); ++w) g[w] = y->holds(w, 3) ? 1 : 0;
  auto f = Embedding::from_surjection(x, y, g);
  EXPECT_EQ(f.backing(), Embedding::Backing::kSurjection);
  EXPECT_EQ(f.image(1).count(), 8u);
  EXPECT_TRUE(f.apply(event_of(x, "colorful")) == event_of(y, "colorful"));
  EXPECT_TRUE(f.is_faithful());
  EXPECT_TRUE(faithful_by_enumeration(f));
  EXPECT_TRUE(homomorphism_by_enumeration(f));
}

TEST(Embedding, SurjectionMustBeOnto) {
  auto x = space_of({"p"});
  auto y = space_of({"a", "b"});
  EXPECT_THROW(Embedding::from_surjection(x, y, {0, 0, 0, 0}), Error);
  EXPECT_THROW(Embedding::from_surjection(x, y, {0, 1, 2, 0}), Error);
}

TEST(Embedding, InterpretationColorfulIsFaithful) {
  auto x = space_of({"colorful"});
  auto y = colors();
  auto f = from_interpretation({{"colorful", parse_formula("red | blue | green")}}, x, y);
  EXPECT_TRUE(f.is_faithful());
  EXPECT_TRUE(faithful_by_enumeration(f));
  EXPECT_TRUE(homomorphism_by_enumeration(f));
  EXPECT_EQ(f.image(1).count(), 3u);
  EXPECT_EQ(f.image(0).count(), 1u);
}

TEST(Embedding, CollapsingInterpretationIsUnfaithful) {
  auto x = space_of({"p", "q"});
  auto y = space_of({"r"});
  auto f = from_interpretation({{"p", parse_formula("r")}, {"q", parse_formula("r")}}, x, y);
  EXPECT_FALSE(f.is_faithful());
  EXPECT_FALSE(faithful_by_enumeration(f));
  // p & !q has no preimage: {p, !q} is sent to the empty event.
  EXPECT_TRUE(f.apply(event_of(x, "p & !q")).empty());
}

TEST(Embedding, InterpretationNeedsEverySymbol) {
  auto x = space_of({"p", "q"});
  auto y = space_of({"r"});
  EXPECT_THROW(from_interpretation({{"p", parse_formula("r")}}, x, y), Error);
}

TEST(Embedding, ComposeAgreesWithApplyingTwice) {
  auto x = space_of({"p"});
  auto y = space_of({"a", "b"});
  auto z = space_of({"c", "d", "e"});
  auto f = random_faithful_embedding(x, y, 3);
  auto g = random_faithful_embedding(y, z, 4);
  auto h = compose(f, g);
  for (unsigned m = 0; m < 4; ++m) {
    Event s = subset(x, m);
    EXPECT_TRUE(h.apply(s) == g.apply(f.apply(s)));
  }
  EXPECT_TRUE(h.is_faithful());
}

TEST(Embedding, ProductEmbedding) {
  auto a = space_of({"a"});
  auto b = space_of({"b"});
  auto c = space_of({"c1", "c2"});
  auto d = space_of({"d1", "d2"});
  auto f1 = random_faithful_embedding(a, c, 1);
  auto f2 = random_faithful_embedding(b, d, 2);
  auto f = product_embedding({f1, f2});
  EXPECT_EQ(f.source()->size(), 4u);
  EXPECT_EQ(f.target()->size(), 16u);
  EXPECT_TRUE(f.is_faithful());
  EXPECT_TRUE(homomorphism_by_enumeration(f));
  // Images of product worlds are rectangles of the part images.
  for (std::size_t x = 0; x < f.source()->size(); ++x) {
    auto i = f.source()->factor_coordinate(x, 0), j = f.source()->factor_coordinate(x, 1);
    EXPECT_EQ(f.image(x).count(), f1.image(i).count() * f2.image(j).count());
  }
}

TEST(Embedding, PermutationEmbedding) {
  auto a = space_of({"a1", "a2"});
  auto ab = product_space({a, a});
  auto swap = permutation_embedding(ab, {1, 0});
  EXPECT_TRUE(swap.is_faithful());
  EXPECT_TRUE(homomorphism_by_enumeration(swap));
  for (std::size_t x = 0; x < ab->size(); ++x) {
    ASSERT_EQ(swap.image(x).count(), 1u);
    auto y = swap.image(x).worlds()[0];
    EXPECT_EQ(ab->factor_coordinate(y, 0), ab->factor_coordinate(x, 1));
    EXPECT_EQ(ab->factor_coordinate(y, 1), ab->factor_coordinate(x, 0));
  }
  auto mixed = product_space({a, space_of({"b"})});
  EXPECT_THROW(permutation_embedding(mixed, {1, 0}), Error);
}

TEST(Embedding, RandomFaithfulIsDeterministicAndOnto) {
  auto x = space_of({"p", "q"});
  auto y = space_of({"a", "b", "c"});
  auto f = random_faithful_embedding(x, y, 99);
  auto g = random_faithful_embedding(x, y, 99);
  for (std::size_t i = 0; i < x->size(); ++i) {
    EXPECT_TRUE(f.image(i) == g.image(i));
    EXPECT_FALSE(f.image(i).empty());
  }
  EXPECT_TRUE(faithful_by_enumeration(f));
  EXPECT_THROW(random_faithful_embedding(y, x, 1), Error);
}

TEST(Embedding, CylinderEmbedding) {
  auto ab = product_space({space_of({"a"}), space_of({"b"})});
  auto f = cylinder_embedding(ab, 1);
  EXPECT_TRUE(f.apply(event_of(f.source(), "b")) == event_of(ab, "b"));
  EXPECT_TRUE(f.is_faithful());
}

TEST(Embedding, PushforwardCorresponds) {
  auto x = space_of({"colorful"});
  auto y = colors();
  auto f = from_interpretation({{"colorful", parse_formula("red | blue | green")}}, x, y);
  auto nu = ExactMeasure(y, {ratio(1, 10), ratio(2, 10), ratio(3, 10), ratio(4, 10)});
  auto mu = pushforward(f, nu);
  EXPECT_EQ(mu[0], ratio(1, 10));
  EXPECT_EQ(mu[1], ratio(9, 10));
  EXPECT_TRUE(corresponds(f, mu, nu));
  EXPECT_FALSE(corresponds(f, ExactMeasure::uniform(x), ExactMeasure::uniform(y)));
}

TEST(MeasureSet, FiberMembership) {
  auto x = space_of({"colorful"});
  auto y = colors();
  auto f = from_interpretation({{"colorful", parse_formula("red | blue | green")}}, x, y);
  auto fiber = correspondents(f, Measure::uniform(x));
  EXPECT_TRUE(fiber.is_fiber());
  EXPECT_TRUE(fiber.contains(Measure(y, {0.5, 0.25, 0.125, 0.125})));
  EXPECT_FALSE(fiber.contains(Measure::uniform(y)));
}

TEST(MeasureSet, CorrespondSets) {
  auto x = space_of({"colorful"});
  auto y = colors();
  auto f = from_interpretation({{"colorful", parse_formula("red | blue | green")}}, x, y);
  std::vector<Measure> dx = {Measure::uniform(x)};
  std::vector<Measure> dy = {Measure(y, {0.5, 0.5, 0.0, 0.0}), Measure(y, {0.5, 0.0, 0.0, 0.5})};
  EXPECT_TRUE(correspond_sets(f, dx, dy));
  // Uniform on Y pushes to (1/4, 3/4), outside dx.
  EXPECT_FALSE(correspond_sets(f, dx, {Measure::uniform(y)}));
  // An mu with no preimage in dy.
  EXPECT_FALSE(correspond_sets(f, {Measure::uniform(x), Measure(x, {0.2, 0.8})}, dy));
  auto den = MeasureSet::denotation(parse_constraint("P(colorful) >= 1/2", x));
  EXPECT_TRUE(den.contains(Measure::uniform(x)));
  EXPECT_FALSE(den.contains(Measure(x, {0.8, 0.2})));
}

TEST(Embedding, FaithfulEmbeddingsTransportEntailment) {
  // KB |= theta iff f*(KB) |= f*(theta), checked against random faithful maps.
  std::mt19937_64 rng(5);
  auto x = space_of({"p", "q"});
  auto y = space_of({"a", "b", "c"});
  std::vector<std::pair<std::string, std::string>> pairs = {
      {"P(p) >= 1/2", "P((p | q)) >= 1/2"},
      {"P(p) >= 1/2 & P(q) >= 1/2", "P(p & q) >= 0"},
      {"P(p) >= 1/2", "P(q) >= 1/2"},
      {"P(p & q) = 1/3", "P(p) >= 1/3"},
      {"P(p | q) = 1", "P(p & q) >= 1/2"},
  };
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    auto f = random_faithful_embedding(x, y, seed);
    for (const auto& [k, t] : pairs) {
      auto kb = parse_constraint(k, x);
      auto theta = parse_constraint(t, x);
      EXPECT_EQ(entails(kb, theta), entails(translate(f, kb), translate(f, theta))) << k << " |= " << t;
    }
  }
}
