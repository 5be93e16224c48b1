// Acceptance suite: one PASS/FAIL line per criterion; exits nonzero on any FAIL.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "repind/constraint.hpp"
#include "repind/entail.hpp"
#include "repind/harness.hpp"
#include "repind/measure.hpp"
#include "repind/optimize.hpp"
#include "repind/procedures.hpp"

using namespace repind;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

SpacePtr space_of(std::vector<std::string> symbols, const std::string& restriction = "") {
  return enumerate_worlds(symbols, restriction);
}

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const std::string& title, const std::function<Outcome()>& body) {
  auto t0 = Clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s (%.2fs) %s\n", o.pass ? "PASS" : "FAIL", id, title.c_str(), seconds_since(t0),
              o.detail.c_str());
  std::fflush(stdout);
}

// Maxent probability of `event` on kb = true, through the public procedure.
double maxent_prob(const SpacePtr& s, const std::string& event) {
  auto r = maxent(parse_constraint("true", s));
  return r.measures.at(0).prob(event_of(s, event));
}

long falling(long n, long d) {
  long r = 1;
  for (long k = 0; k < d; ++k) r *= n - k;
  return r;
}

// Exact marginal of a measure on product_space({a, b}) onto factor i.
std::vector<Rational> marginal(const ExactMeasure& mu, std::size_t i) {
  const auto& f = mu.space()->factors().at(i).space;
  std::vector<Rational> w(f->size(), Rational(0));
  for (std::size_t x = 0; x < mu.size(); ++x) w[mu.space()->factor_coordinate(x, i)] += mu[x];
  return w;
}

// Random exact measure with mass m on s, split by random integer weights.
ExactMeasure with_mass(const Event& s, const Rational& m, std::mt19937_64& rng) {
  const auto& space = s.space();
  std::uniform_int_distribution<long> d(1, 9);
  std::vector<Rational> raw(space->size());
  Rational in = 0, out = 0;
  for (std::size_t x = 0; x < raw.size(); ++x) {
    raw[x] = Rational(d(rng));
    (s.contains(x) ? in : out) += raw[x];
  }
  for (std::size_t x = 0; x < raw.size(); ++x) raw[x] = s.contains(x) ? Rational(raw[x] * m / in) : Rational(raw[x] * (1 - m) / out);
  return ExactMeasure(space, raw);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

int main() {
  run(1, "maxent on colorful spaces", [] {
    auto t0 = Clock::now();
    double one = maxent_prob(space_of({"colorful"}), "colorful");
    double eight = maxent_prob(space_of({"red", "blue", "green"}), "red | blue | green");
    double t = seconds_since(t0);
    char buf[128];
    std::snprintf(buf, sizeof buf, "P(colorful)=%.9f P(r|b|g)=%.9f", one, eight);
    return Outcome{std::abs(one - 0.5) <= 1e-6 && std::abs(eight - 0.875) <= 1e-6 && t < 1.0, buf};
  });

  run(2, "maxent on bird spaces", [] {
    double four = maxent_prob(space_of({"flying-bird", "bird"}), "bird");
    double three = maxent_prob(space_of({"flying-bird", "bird"}, "flying-bird => bird"), "bird");
    char buf[128];
    std::snprintf(buf, sizeof buf, "4 worlds %.9f, 3 worlds %.9f", four, three);
    return Outcome{std::abs(four - 0.5) <= 1e-6 && std::abs(three - 2.0 / 3.0) <= 1e-6, buf};
  });

  run(3, "maxent attainment", [] {
    auto s = space_of({"x1"});
    auto open = maxent(parse_constraint("P(x1) < 1/2", s));
    auto wide = maxent(parse_constraint("P(x1) < 2/3", s));
    bool at_uniform = wide.status == ProjectionStatus::kAttained && wide.measures.size() == 1 &&
                      approx_equal(wide.measures[0], Measure::uniform(s), 1e-9);
    return Outcome{open.status == ProjectionStatus::kNotAttained && at_uniform,
                   "< 1/2: " + to_string(open.status) + ", < 2/3: " + to_string(wide.status)};
  });

  run(4, "KLM properties", [] {
    auto t0 = Clock::now();
    auto corpus = random_klm_corpus(50, 2024, true);
    std::mt19937_64 rng(77);
    PriorFunction::Table table;
    for (const auto& s : corpus.spaces) table.emplace_back(s, std::vector<Measure>{random_measure(s, rng), random_measure(s, rng)});
    std::vector<InferenceProcedure> procs = {InferenceProcedure::entailment(), InferenceProcedure::maxent(),
                                             InferenceProcedure::i0(), InferenceProcedure::i1(),
                                             InferenceProcedure::prior_based(PriorFunction::finite(table), "finite-prior")};
    bool ok = corpus.kbs.size() >= 50;
    std::string detail = std::to_string(corpus.kbs.size()) + " kbs;";
    for (const auto& p : procs) {
      auto r = klm_properties_check(p, corpus.kbs, corpus.thetas);
      bool checked = true;
      for (const auto& prop : kKlmProperties) checked = checked && r.checks[prop] > 0;
      ok = ok && r.all_hold() && checked;
      detail += " " + p.name() + (r.all_hold() ? " ok" : " VIOLATED");
    }
    auto broken = klm_properties_check(broken_procedure(5), corpus.kbs, corpus.thetas);
    ok = ok && !broken.holds("reflexivity");
    detail += std::string(" broken reflexivity ") + (broken.holds("reflexivity") ? "holds" : "fails");
    double t = seconds_since(t0);
    return Outcome{ok && t < 30.0, detail};
  });

  run(5, "I1 and falsification", [] {
    auto s = space_of({"S"});
    bool i1_infers =
        infers(InferenceProcedure::i1(), parse_constraint("P(S) >= 1/4", s), parse_constraint("P(S) >= 1/3", s)).holds;
    HarnessConfig cfg;
    cfg.budget = 1000;
    cfg.max_worlds = 8;
    cfg.seed = 7;
    auto i1 = rep_independence_falsify(InferenceProcedure::i1(), cfg);
    HarnessConfig obj = cfg;
    obj.templates = HarnessConfig::Templates::kObjective;
    auto i1o = rep_independence_falsify(InferenceProcedure::i1(), obj);
    auto i0 = rep_independence_falsify(InferenceProcedure::i0(), obj);
    auto me = rep_independence_falsify(InferenceProcedure::maxent(), cfg);
    bool ok = i1_infers && i1.ok() && i1.trials == 1000 && i1o.ok() && i0.ok() && i0.trials == 1000 && !me.ok() &&
              me.trials <= 1000;
    return Outcome{ok, "i1 " + std::to_string(i1.trials) + "+" + std::to_string(i1o.trials) + " trials clean, i0 " +
                           std::to_string(i0.trials) + " clean, maxent violated at trial " +
                           std::to_string(me.trials)};
  });

  run(6, "I0", [] {
    auto s = space_of({"p"});
    auto kb = parse_constraint("true", s);
    auto q = parse_constraint("P(p) > 0 & P(p) < 1", s);
    bool i0 = infers(InferenceProcedure::i0(), kb, q).holds;
    bool ent = entails(kb, q);
    auto pq = space_of({"p", "q"});
    std::vector<Event> events;
    for (unsigned m = 1; m + 1 < (1u << pq->size()); ++m) {
      Event::Bits b(pq->size());
      for (std::size_t i = 0; i < pq->size(); ++i)
        if (m >> i & 1u) b.set(i);
      events.emplace_back(pq, b);
    }
    std::size_t witnesses = 0;
    bool unit = true;
    for (const char* k : {"true", "P(p) = 1", "P((p | q)) = 1", "P(p & q) = 1", "P(p) = 1 & P(q) = 1"}) {
      auto r = essentially_entailment_probe(InferenceProcedure::i0(), parse_constraint(k, pq), events,
                                            template_bounds());
      witnesses += r.witnesses.size();
      unit = unit && r.only_unit_interval();
    }
    return Outcome{i0 && !ent && unit && witnesses > 0,
                   "i0 " + std::string(i0 ? "infers" : "misses") + ", entails " + (ent ? "true" : "false") + ", " +
                       std::to_string(witnesses) + " witnesses"};
  });

  run(7, "projection commutes with pushforward", [] {
    std::mt19937_64 rng(7007);
    std::size_t done = 0, bad = 0, attempts = 0;
    double worst = 0;
    while (done < 200 && attempts < 5000) {
      ++attempts;
      std::uniform_int_distribution<std::size_t> xn(2, 4);
      auto x = random_space(xn(rng), rng, "x");
      std::uniform_int_distribution<std::size_t> yn(x->size(), 8);
      auto y = random_space(yn(rng), rng, "y");
      auto f = random_faithful_embedding(x, y, rng());
      // One or two non-strict atoms: a convex kb with a unique projection.
      auto kb = random_atom(x, rng, false);
      if (rng() % 2) kb = kb && random_atom(x, rng, false);
      if (!satisfiable(kb).feasible) continue;
      auto nu = random_measure(y, rng);
      auto on_y = kl_project(nu, translate(f, kb));
      auto on_x = kl_project(pushforward(f, nu), kb);
      if (on_y.status != ProjectionStatus::kAttained || on_x.status != ProjectionStatus::kAttained) {
        ++bad;
        ++done;
        continue;
      }
      double dist = distance(pushforward(f, on_y.measures.at(0)), on_x.measures.at(0));
      worst = std::max(worst, dist);
      if (dist > 1e-6) ++bad;
      ++done;
    }
    char buf[128];
    std::snprintf(buf, sizeof buf, "%zu triples, %zu mismatches, max distance %.3g", done, bad, worst);
    return Outcome{done == 200 && bad == 0, buf};
  });

  run(8, "chain rule", [] {
    std::mt19937_64 rng(8008);
    double worst = 0;
    for (int t = 0; t < 1000; ++t) {
      std::uniform_int_distribution<std::size_t> xn(2, 4);
      auto x = random_space(xn(rng), rng, "x");
      std::uniform_int_distribution<std::size_t> yn(x->size(), 8);
      auto y = random_space(yn(rng), rng, "y");
      auto f = random_faithful_embedding(x, y, rng());
      auto nu2 = random_measure(y, rng, 0.7);
      auto nu = random_measure(y, rng, 1.5);
      worst = std::max(worst, kl_chain_identity_residual(nu2, nu, f));
    }
    char buf[96];
    std::snprintf(buf, sizeof buf, "max residual %.3g over 1000 triples", worst);
    return Outcome{worst <= 1e-9, buf};
  });

  run(9, "bootstrap with uniform priors", [] {
    std::mt19937_64 rng(9009);
    bool ok = true;
    std::size_t instances = 0;
    for (std::size_t k = 2; k <= 4; ++k) {
      for (int rep = 0; rep < 5; ++rep) {
        auto x = random_space(k, rng, "x");
        auto y = random_space(2 * k, rng, "y");
        std::vector<std::size_t> g(y->size());
        for (std::size_t w = 0; w < g.size(); ++w) g[w] = w % k;
        auto f = Embedding::from_surjection(x, y, g);
        std::vector<std::pair<Constraint, Constraint>> corpus;
        for (int c = 0; c < 6; ++c) corpus.emplace_back(random_constraint(x, rng, 1), random_atom(x, rng));
        auto r = bootstrap_check({Measure::uniform(x)}, {Measure::uniform(y)}, f, corpus);
        ok = ok && r.corresponding && r.invariance.ok();
        ++instances;
      }
    }
    auto cx = space_of({"colorful"});
    auto cy = space_of({"red", "blue", "green"}, "!(red & blue) & !(red & green) & !(blue & green)");
    auto f = from_interpretation({{"colorful", parse_formula("red | blue | green")}}, cx, cy);
    auto bad = bootstrap_check({Measure::uniform(cx)}, {Measure::uniform(cy)}, f, {});
    bool kb_true = false;
    for (const auto& v : bad.invariance.violations) kb_true = kb_true || v.kb == "true";
    ok = ok && !bad.corresponding && kb_true;
    return Outcome{ok, std::to_string(instances) + " equal-fibre embeddings invariant; colorful " +
                           (bad.corresponding ? "corresponds" : "does not correspond") +
                           (kb_true ? ", kb=true violation shown" : "")};
  });

  run(10, "product prior", [] {
    auto t0 = Clock::now();
    HarnessConfig cfg;
    cfg.seed = 10;
    cfg.budget = 1000;
    auto r = products_invariance_check(200, 50, cfg);
    double t = seconds_since(t0);
    bool ok = r.product_embeddings == 200 && r.permutation_embeddings == 50 && r.violations.empty() &&
              r.crossing_violation_found && t < 120.0;
    return Outcome{ok, std::to_string(r.pairs) + " pairs, " + std::to_string(r.violations.size()) +
                           " violations, crossing " + (r.crossing_violation_found ? "violated" : "not violated")};
  });

  run(11, "almost-trivial gadget", [] {
    bool ok = true;
    std::string detail;
    for (auto [n, d] : std::vector<std::pair<long, long>>{{3, 2}, {4, 2}, {4, 3}, {5, 2}}) {
      auto g = almosttrivial2_gadget(n, d);
      // Independent counts: tuples of d distinct elements of [n].
      const long worlds = falling(n, d);
      const long u = worlds - falling(n - 1, d);
      const long pair = worlds - 2 * falling(n - 1, d) + falling(n - 2, d);
      bool counts = static_cast<long>(g.worlds) == worlds && static_cast<long>(g.u_size) == u &&
                    static_cast<long>(g.pair_size) == pair && g.counts_match && g.sum_identity;
      for (const auto& e : g.u) counts = counts && static_cast<long>(e.count()) == u;
      // Threshold: Pr(U_i) > a for all i is infeasible iff a >= d/n.
      const Rational dn = ratio(d, n);
      bool threshold = true;
      for (const Rational& a : std::vector<Rational>{dn - ratio(1, 50), dn, dn + ratio(1, 50)}) {
        std::vector<Constraint> conj;
        for (const auto& e : g.u) conj.push_back(prob(e, Comparator::kGreater, a));
        bool infeasible = !satisfiable(Constraint::all_of(g.y0, conj)).feasible;
        threshold = threshold && infeasible == (a >= dn);
      }
      threshold = threshold && g.threshold_exact;
      // Uniform on U_i: mass on U_j is |U_i & U_j| / |U_i|.
      bool witnesses = g.witnesses_exact && ratio(pair, u) == ratio(d - 1, n - 1);
      for (std::size_t i = 0; i < g.u.size(); ++i) {
        std::vector<Rational> w(g.y0->size(), Rational(0));
        for (auto y : g.u[i].worlds()) w[y] = ratio(1, u);
        ExactMeasure mu(g.y0, w);
        witnesses = witnesses && mu.prob(g.u[i]) == 1;
        for (std::size_t j = 0; j < g.u.size(); ++j)
          if (j != i) witnesses = witnesses && mu.prob(g.u[j]) == ratio(d - 1, n - 1);
      }
      ok = ok && counts && threshold && witnesses && g.ok();
      detail += "(" + std::to_string(n) + "," + std::to_string(d) + ")" + (counts && threshold && witnesses ? "ok " : "BAD ");
    }
    return Outcome{ok, detail};
  });

  run(12, "coupling", [] {
    std::mt19937_64 rng(1212);
    std::size_t exact = 0;
    for (int t = 0; t < 100; ++t) {
      std::uniform_int_distribution<std::size_t> n(2, 6);
      auto x0 = random_space(n(rng), rng, "u");
      auto x1 = random_space(n(rng), rng, "v");
      auto s0 = random_event(x0, rng);
      auto s1 = random_event(x1, rng);
      auto mu0 = random_exact_measure(x0, rng);
      Rational m = mu0.prob(s0);
      // mu1 needs the same mass on s1; degenerate masses go on s1 exactly.
      auto mu1 = with_mass(s1, m, rng);
      auto c = couple(mu0, s0, mu1, s1);
      auto m0 = marginal(c, 0), m1 = marginal(c, 1);
      bool ok = m0 == mu0.weights() && m1 == mu1.weights() && c.prob(iff_event(c.space(), s0, s1)) == 1;
      exact += ok;
    }
    return Outcome{exact == 100, std::to_string(exact) + "/100 exact"};
  });

  run(13, "README states coverage of universal theorems", [] {
    auto text = read_file(REPIND_README);
    bool ok = text.find("universal theorems are covered by instance checks") != std::string::npos;
    for (const char* c : {"5", "9", "10", "11"}) ok = ok && text.find(std::string("criterion ") + c) != std::string::npos;
    return Outcome{ok, ""};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAIL" : "PASS", failures);
  return failures ? 1 : 0;
}
