#include <gtest/gtest.h>

#include <random>

#include "repind/entail.hpp"
#include "repind/harness.hpp"
#include "repind/lp.hpp"

using namespace repind;

namespace {

SpacePtr space_of(std::vector<std::string> symbols, const std::string& restriction = "") {
  return enumerate_worlds(symbols, restriction);
}

using Row = std::pair<std::vector<Rational>, Rational>;  // a . x = b

/// Unique solution of a square-or-taller system, by Gauss-Jordan elimination.
std::optional<std::vector<Rational>> solve_unique(std::vector<Row> rows, std::size_t n) {
  std::size_t r = 0;
  std::vector<std::size_t> pivots;
  for (std::size_t c = 0; c < n && r < rows.size(); ++c) {
    std::size_t p = r;
    while (p < rows.size() && rows[p].first[c] == 0) ++p;
    if (p == rows.size()) continue;
    std::swap(rows[p], rows[r]);
    Rational lead = rows[r].first[c];
    for (auto& v : rows[r].first) v /= lead;
    rows[r].second /= lead;
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (i == r || rows[i].first[c] == 0) continue;
      Rational m = rows[i].first[c];
      for (std::size_t k = 0; k < n; ++k) rows[i].first[k] -= m * rows[r].first[k];
      rows[i].second -= m * rows[r].second;
    }
    pivots.push_back(c);
    ++r;
  }
  for (std::size_t i = r; i < rows.size(); ++i)
    if (rows[i].second != 0) return std::nullopt;
  if (pivots.size() != n) return std::nullopt;
  std::vector<Rational> x(n);
  for (std::size_t i = 0; i < n; ++i) x[pivots[i]] = rows[i].second;
  return x;
}

/// Vertices of {x in simplex : eq rows, ge rows}, by trying every set of tight rows.
std::vector<std::vector<Rational>> oracle_vertices(std::size_t n, const std::vector<Row>& eq, const std::vector<Row>& ge) {
  std::vector<Row> candidates = ge;
  for (std::size_t i = 0; i < n; ++i) {
    std::vector<Rational> e(n, 0);
    e[i] = 1;
    candidates.emplace_back(e, 0);
  }
  std::vector<Row> base = eq;
  base.emplace_back(std::vector<Rational>(n, 1), 1);
  std::vector<std::vector<Rational>> out;
  const std::size_t m = candidates.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << m); ++mask) {
    std::vector<Row> sys = base;
    for (std::size_t i = 0; i < m; ++i)
      if (mask >> i & 1) sys.push_back(candidates[i]);
    auto x = solve_unique(sys, n);
    if (!x) continue;
    bool ok = true;
    for (const auto& [a, b] : candidates) {
      Rational v = 0;
      for (std::size_t k = 0; k < n; ++k) v += a[k] * (*x)[k];
      ok = ok && v >= b;
    }
    if (ok && std::find(out.begin(), out.end(), *x) == out.end()) out.push_back(*x);
  }
  return out;
}

Row row_of(const LinearAtom& atom, const SpacePtr& s, bool negate = false) {
  auto a = atom.coefficients(s);
  Rational b = atom.bound;
  if (negate) {
    for (auto& v : a) v = -v;
    b = -b;
  }
  return {a, b};
}

}  // namespace

TEST(Lp, SmallProblems) {
  lp::Problem p;
  p.num_vars = 2;
  p.rows = {{{1, 1}, lp::Sense::kLessEq, 4}, {{1, 3}, lp::Sense::kLessEq, 6}};
  p.objective = {3, 2};
  auto s = lp::solve(p);
  ASSERT_EQ(s.status, lp::Status::kOptimal);
  EXPECT_EQ(s.value, 12);
  p.rows.push_back({{1, 0}, lp::Sense::kGreaterEq, 5});
  EXPECT_EQ(lp::solve(p).status, lp::Status::kInfeasible);
  lp::Problem u;
  u.num_vars = 1;
  u.rows = {{{1}, lp::Sense::kGreaterEq, 1}};
  u.objective = {1};
  EXPECT_EQ(lp::solve(u).status, lp::Status::kUnbounded);
}

TEST(Lp, DegenerateCyclingExample) {
  // Beale's example cycles under the textbook rule; Bland's rule terminates.
  lp::Problem p;
  p.num_vars = 4;
  p.rows = {{{Rational(1, 4), -60, Rational(-1, 25), 9}, lp::Sense::kLessEq, 0},
            {{Rational(1, 2), -90, Rational(-1, 50), 3}, lp::Sense::kLessEq, 0},
            {{0, 0, 1, 0}, lp::Sense::kLessEq, 1}};
  p.objective = {Rational(3, 4), -150, Rational(1, 50), -6};
  auto s = lp::solve(p);
  ASSERT_EQ(s.status, lp::Status::kOptimal);
  EXPECT_EQ(s.value, Rational(1, 20));
}

TEST(Entail, Satisfiable) {
  auto s = space_of({"s"});
  EXPECT_FALSE(satisfiable(parse_constraint("P(s) >= 1/4 & P(s) < 1/8", s)).feasible);
  auto r = satisfiable(parse_constraint("0 < P(s) < 1", s));
  ASSERT_TRUE(r.feasible);
  ASSERT_TRUE(r.witness);
  EXPECT_TRUE(satisfies(*r.witness, parse_constraint("0 < P(s) < 1", s)));
  EXPECT_FALSE(satisfiable(parse_constraint("P(s) > 1", s)).feasible);
  EXPECT_TRUE(satisfiable(parse_constraint("P(s) >= 1", s)).feasible);
}

TEST(Entail, GadgetThreshold) {
  auto g = almosttrivial2_gadget(3, 2);
  for (auto [alpha, feasible] : std::vector<std::pair<Rational, bool>>{{Rational(2, 3), false},
                                                                         {Rational(3, 4), false},
                                                                         {Rational(13, 20), true}}) {
    std::vector<Constraint> conj;
    for (const auto& u : g.u) conj.push_back(prob(u, Comparator::kGreater, alpha));
    EXPECT_EQ(satisfiable(Constraint::all_of(g.y0, conj)).feasible, feasible) << alpha;
  }
}

TEST(Entail, Examples) {
  auto s = space_of({"s"});
  EXPECT_TRUE(entails(parse_constraint("P(s) >= 1/2", s), parse_constraint("P(s) >= 1/3", s)));
  auto ab = space_of({"a", "b"});
  EXPECT_TRUE(entails(parse_constraint("P(a) >= 1/2 & P(b) >= 9/10", ab), parse_constraint("P(a & b) >= 2/5", ab)));
  EXPECT_FALSE(entails(parse_constraint("P(a) >= 1/2 & P(b) >= 9/10", ab), parse_constraint("P(a & b) >= 41/100", ab)));
  auto fbr = space_of({"fly", "bird", "red"});
  auto kb = parse_constraint("P(fly | bird) >= 0.9", fbr);
  auto theta = parse_constraint("P(fly | bird & red) >= 0.9", fbr);
  EXPECT_FALSE(entails(kb, theta));
  auto cex = entailment_counterexample(kb, theta);
  ASSERT_TRUE(cex);
  EXPECT_TRUE(satisfies(*cex, kb));
  EXPECT_FALSE(satisfies(*cex, theta));
}

TEST(Entail, Equivalence) {
  auto s = space_of({"a", "b"});
  EXPECT_TRUE(equivalent(parse_constraint("P(a) = 1 & P(b) = 1", s), parse_constraint("P(a & b) = 1", s)));
  EXPECT_TRUE(equivalent(parse_constraint("P(a) >= 1/4", s), parse_constraint("!(P(a) < 1/4)", s)));
  EXPECT_FALSE(equivalent(parse_constraint("P(a) >= 1/4", s), parse_constraint("P(a) >= 1/3", s)));
}

TEST(Entail, Interesting) {
  auto s = space_of({"a", "b"});
  auto e = is_interesting(parse_constraint("P(a) >= 1/4", s));
  ASSERT_TRUE(e);
  EXPECT_EQ(*e, event_of(s, "a"));
  auto n = is_interesting(parse_constraint("!(P((a | b)) < 1/4)", s));
  ASSERT_TRUE(n);
  EXPECT_EQ(*n, event_of(s, "a | b"));
  EXPECT_FALSE(is_interesting(Constraint::truth(s)));
  EXPECT_FALSE(is_interesting(parse_constraint("P(a) >= 1/2", s)));
  EXPECT_FALSE(is_interesting(parse_constraint("P(a) >= 1/4 & P(b) >= 1/4", s)));
}

TEST(Entail, AgreesWithVertexOracleOnClosedKbs) {
  std::mt19937_64 rng(2024);
  int checked = 0;
  for (int k = 0; k < 150; ++k) {
    auto x = random_space(2 + k % 3, rng);
    std::vector<Row> eq, ge;
    std::vector<Constraint> atoms;
    const int count = 1 + k % 3;
    for (int i = 0; i < count; ++i) {
      auto c = random_atom(x, rng, false);
      atoms.push_back(c);
      const auto& a = c.linear_atom();
      switch (a.comparator) {
        case Comparator::kEqual: eq.push_back(row_of(a, x)); break;
        case Comparator::kGreaterEq: ge.push_back(row_of(a, x)); break;
        default: ge.push_back(row_of(a, x, true)); break;
      }
    }
    auto kb = Constraint::all_of(x, atoms);
    auto verts = oracle_vertices(x->size(), eq, ge);
    EXPECT_EQ(satisfiable(kb).feasible, !verts.empty()) << kb.to_string();
    if (verts.empty()) continue;
    Event s = random_event(x, rng);
    auto range = prob_range(kb, s);
    ASSERT_TRUE(range);
    Rational lo = 2, hi = -1;
    for (const auto& v : verts) {
      Rational p = 0;
      for (auto w : s.worlds()) p += v[w];
      lo = std::min(lo, p);
      hi = std::max(hi, p);
    }
    EXPECT_EQ(range->low, lo);
    EXPECT_EQ(range->high, hi);
    EXPECT_TRUE(entails(kb, prob(s, Comparator::kGreaterEq, lo)));
    EXPECT_TRUE(entails(kb, prob(s, Comparator::kLessEq, hi)));
    EXPECT_FALSE(entails(kb, prob(s, Comparator::kGreater, lo)));
    if (lo > 0) {
      EXPECT_FALSE(entails(kb, prob(s, Comparator::kGreaterEq, lo + Rational(1, 1000))));
    }
    ++checked;
  }
  EXPECT_GT(checked, 50);
}

TEST(Entail, EnumerateVerticesMatchesOracle) {
  std::mt19937_64 rng(77);
  for (int k = 0; k < 60; ++k) {
    auto x = random_space(2 + k % 3, rng);
    auto c = Constraint::all_of(x, {random_atom(x, rng, false), random_atom(x, rng, false)});
    auto dnf = to_dnf(c);
    ASSERT_EQ(dnf.systems.size(), 1u);
    std::vector<Row> eq, ge;
    for (auto& r : dnf.systems[0].equalities) eq.emplace_back(r.coefficients, r.bound);
    for (auto& r : dnf.systems[0].inequalities) ge.emplace_back(r.coefficients, r.bound);
    auto mine = enumerate_vertices(dnf.systems[0], x->size(), 100000);
    ASSERT_TRUE(mine);
    auto theirs = oracle_vertices(x->size(), eq, ge);
    std::sort(mine->begin(), mine->end());
    std::sort(theirs.begin(), theirs.end());
    EXPECT_EQ(*mine, theirs) << c.to_string();
  }
}

TEST(Entail, StrictBoundariesAreRespected) {
  auto s = space_of({"s"});
  // Open interval: every point has P(s) > 0 but no positive lower bound is entailed.
  auto kb = parse_constraint("0 < P(s) < 1/2", s);
  EXPECT_TRUE(entails(kb, parse_constraint("P(s) > 0", s)));
  EXPECT_FALSE(entails(kb, parse_constraint("P(s) >= 1/1000000", s)));
  auto r = prob_range(kb, event_of(s, "s"));
  ASSERT_TRUE(r);
  EXPECT_EQ(r->low, 0);
  EXPECT_FALSE(r->low_attained);
  EXPECT_EQ(r->high, Rational(1, 2));
  EXPECT_FALSE(r->high_attained);
}

TEST(Entail, SamplePointsSatisfy) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 40; ++k) {
    auto x = random_space(2 + k % 4, rng);
    auto c = random_constraint(x, rng, 2);
    for (const auto& m : sample_points(c, 8, k)) EXPECT_TRUE(satisfies(m, c)) << c.to_string();
  }
}

TEST(Entail, Conservativeness) {
  auto x = space_of({"s"});
  auto y = space_of({"t"});
  auto z = product_space({x, y});
  auto lift = cylinder_embedding(z, 0);
  Event s = lift.apply(event_of(x, "s"));
  Event t = cylinder_embedding(z, 1).apply(event_of(y, "t"));
  auto iff = Constraint::linear(z, LinearAtom{{{1, (s & t) | (~s & ~t)}}, Comparator::kEqual, 1});
  EXPECT_EQ(conservative_check(Constraint::truth(x), lift, iff).status, Conservativeness::kVerified);
  EXPECT_EQ(conservative_check(Constraint::truth(x), lift, Constraint::truth(z)).status, Conservativeness::kVerified);
  auto bad = prob(t, Comparator::kEqual, 1) && prob(s, Comparator::kEqual, 0);
  auto r = conservative_check(parse_constraint("P(s) >= 0", x), lift, bad);
  EXPECT_EQ(r.status, Conservativeness::kNotConservative);
  ASSERT_TRUE(r.witness);
  EXPECT_GT(r.witness->prob(event_of(x, "s")), 0);
}
