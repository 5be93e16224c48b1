#include "repind/harness.hpp"

#include <algorithm>
#include <numeric>
#include <sstream>

#include "repind/error.hpp"

namespace repind {
namespace {

std::uint64_t splitmix(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

std::uint64_t trial_seed(std::uint64_t seed, std::uint64_t trial) { return splitmix(splitmix(seed) ^ trial); }

template <class T>
const T& pick(const std::vector<T>& v, std::mt19937_64& rng) {
  return v[std::uniform_int_distribution<std::size_t>(0, v.size() - 1)(rng)];
}

std::size_t uniform(std::size_t lo, std::size_t hi, std::mt19937_64& rng) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

struct Outcome {
  std::string label;
  VerdictMode mode = VerdictMode::kExact;
};

Outcome run(const InferenceProcedure& proc, const Constraint& kb, const Constraint& theta, const InferenceConfig& cfg) {
  try {
    auto v = infers(proc, kb, theta, cfg);
    return {v.holds ? "holds" : "fails", v.mode};
  } catch (const DomainError&) {
    return {"outside domain", VerdictMode::kExact};
  }
}

Constraint objective_kb(const SpacePtr& x, std::mt19937_64& rng) {
  auto t1 = random_event(x, rng, false);
  while (t1.empty()) t1 = random_event(x, rng, false);
  if (uniform(0, 1, rng) == 0) return prob(t1, Comparator::kEqual, 1);
  auto t2 = random_event(x, rng, false);
  while ((t1 & t2).empty()) t2 = random_event(x, rng, false);
  return prob(t1, Comparator::kEqual, 1) && prob(t2, Comparator::kEqual, 1);
}

std::pair<Constraint, Constraint> template_pair(const SpacePtr& x, HarnessConfig::Templates kind, std::mt19937_64& rng) {
  if (kind == HarnessConfig::Templates::kObjective)
    return {objective_kb(x, rng), random_constraint(x, rng, static_cast<int>(uniform(0, 1, rng)))};
  if (uniform(0, 3, rng) == 0) {
    // Colour-style: nothing known, a bound on one event.
    return {Constraint::truth(x), prob(random_event(x, rng), pick(std::vector<Comparator>{Comparator::kEqual,
                                                                                           Comparator::kGreaterEq,
                                                                                           Comparator::kLessEq},
                                                                 rng),
                                       pick(template_bounds(), rng))};
  }
  return {random_constraint(x, rng, static_cast<int>(uniform(0, 2, rng))),
          random_constraint(x, rng, static_cast<int>(uniform(0, 1, rng)))};
}

InvarianceViolation make_violation(const InferenceProcedure&, const Embedding& f, const Constraint& kb,
                                   const Constraint& theta, const Outcome& x, const Outcome& y) {
  InvarianceViolation v;
  v.kb = kb.to_string();
  v.theta = theta.to_string();
  v.kb_translated = translate(f, kb).to_string();
  v.theta_translated = translate(f, theta).to_string();
  v.verdict_x = x.label;
  v.verdict_y = y.label;
  v.embedding = describe(f);
  if (x.label == "outside domain" || y.label == "outside domain") v.note = "domain asymmetry";
  return v;
}

std::vector<Event> split_evenly(const std::vector<std::size_t>& worlds, std::size_t parts, const SpacePtr& space) {
  std::vector<Event> out;
  for (std::size_t p = 0; p < parts; ++p) {
    Event::Bits b(space->size());
    if (p + 1 < parts) b.set(worlds[p]);
    else
      for (std::size_t k = p; k < worlds.size(); ++k) b.set(worlds[k]);
    out.emplace_back(space, std::move(b));
  }
  return out;
}

/// Injective d-tuples over 1..n as worlds over symbols a<k>_<i> ("position k holds i").
std::pair<SpacePtr, std::vector<Event>> build_tuple_space(std::size_t n, std::size_t d) {
  std::vector<std::string> names;
  for (std::size_t k = 1; k <= d; ++k)
    for (std::size_t i = 1; i <= n; ++i) names.push_back("a" + std::to_string(k) + "_" + std::to_string(i));
  if (names.size() > kMaxVocabularySize) throw LimitError("tuple space needs too many symbols");
  const std::size_t m = names.size();
  std::vector<WorldBits> worlds;
  std::vector<std::size_t> tuple(d);
  std::function<void(std::size_t, WorldBits, std::vector<bool>&)> rec = [&](std::size_t k, WorldBits bits,
                                                                              std::vector<bool>& used) {
    if (k == d) {
      worlds.push_back(bits);
      return;
    }
    for (std::size_t i = 0; i < n; ++i) {
      if (used[i]) continue;
      used[i] = true;
      rec(k + 1, bits | (WorldBits(1) << (m - 1 - (k * n + i))), used);
      used[i] = false;
    }
  };
  std::vector<bool> used(n, false);
  rec(0, 0, used);
  auto space = Space::create(Vocabulary(names), worlds);
  std::vector<Event> u;
  for (std::size_t i = 0; i < n; ++i) {
    Event::Bits b(space->size());
    for (std::size_t w = 0; w < space->size(); ++w)
      for (std::size_t k = 0; k < d; ++k)
        if (space->holds(w, k * n + i)) b.set(w);
    u.emplace_back(space, std::move(b));
  }
  return {space, u};
}

Rational falling(std::size_t n, std::size_t k) {
  Rational r = 1;
  for (std::size_t i = 0; i < k; ++i) r *= static_cast<long>(n - i);
  return r;
}

ExactMeasure uniform_on(const Event& e) {
  std::vector<Rational> w(e.space()->size(), Rational(0));
  for (auto x : e.worlds()) w[x] = ratio(1, static_cast<long>(e.count()));
  return ExactMeasure(e.space(), std::move(w));
}

/// A factorised (kb, theta) pair over the declared factors of `x`.
std::pair<Constraint, Constraint> factorised_pair(const SpacePtr& x, std::mt19937_64& rng) {
  const std::size_t k = x->factors().size();
  std::vector<Event> cyl;
  std::vector<Rational> bounds;
  std::vector<Constraint> kb;
  bool all_equal = true;
  for (std::size_t i = 0; i < k; ++i) {
    auto lift = cylinder_embedding(x, i);
    Event s = lift.apply(random_event(x->factors()[i].space, rng));
    Comparator cmp = pick(std::vector<Comparator>{Comparator::kEqual, Comparator::kGreaterEq, Comparator::kLessEq,
                                                  Comparator::kGreater, Comparator::kLess},
                          rng);
    Rational b = pick(template_bounds(), rng);
    if ((cmp == Comparator::kGreater && b == 1) || (cmp == Comparator::kLess && b == 0)) cmp = Comparator::kEqual;
    all_equal = all_equal && cmp == Comparator::kEqual;
    cyl.push_back(s);
    bounds.push_back(b);
    kb.push_back(prob(s, cmp, b));
  }
  Constraint kbc = Constraint::all_of(x, kb);
  const std::size_t a = uniform(0, k - 1, rng);
  std::size_t b = uniform(0, k - 2, rng);
  if (b >= a) ++b;
  switch (uniform(0, 2, rng)) {
    case 0:
      return {kbc, Constraint::product(x, ProductAtom{cyl[a] & cyl[b], cyl[a], cyl[b]})};
    case 1:
      if (all_equal) return {kbc, prob(cyl[a] & cyl[b], Comparator::kEqual, bounds[a] * bounds[b])};
      [[fallthrough]];
    default: {
      Comparator cmp = pick(std::vector<Comparator>{Comparator::kGreaterEq, Comparator::kLessEq, Comparator::kGreater,
                                                    Comparator::kLess, Comparator::kEqual},
                            rng);
      return {kbc, prob(cyl[a] & cyl[b], cmp, pick(template_bounds(), rng))};
    }
  }
}

}  // namespace

const std::vector<Rational>& template_bounds() {
  static const std::vector<Rational> bounds = {Rational(0),    Rational(1, 8), Rational(1, 4), Rational(1, 3),
                                               Rational(1, 2), Rational(2, 3), Rational(3, 4), Rational(1)};
  return bounds;
}

Event random_event(const SpacePtr& space, std::mt19937_64& rng, bool proper) {
  const std::size_t n = space->size();
  if (proper && n < 2) throw Error("a one-world space has no proper events");
  while (true) {
    Event::Bits b(n);
    for (std::size_t x = 0; x < n; ++x)
      if (rng() & 1) b.set(x);
    Event e(space, std::move(b));
    if (!proper || (!e.empty() && !e.is_all())) return e;
  }
}

Constraint random_atom(const SpacePtr& space, std::mt19937_64& rng, bool allow_strict) {
  std::vector<Comparator> cmps = {Comparator::kLessEq, Comparator::kEqual, Comparator::kGreaterEq};
  if (allow_strict) {
    cmps.push_back(Comparator::kLess);
    cmps.push_back(Comparator::kGreater);
  }
  const Comparator cmp = pick(cmps, rng);
  const std::size_t shape = uniform(0, 4, rng);
  if (shape == 3) {
    LinearAtom atom{{{1, random_event(space, rng)}, {-1, random_event(space, rng)}},
                    cmp,
                    pick(std::vector<Rational>{Rational(0), Rational(1, 8), Rational(1, 4)}, rng)};
    return Constraint::linear(space, std::move(atom));
  }
  if (shape == 4) return conditional_prob(random_event(space, rng), random_event(space, rng), cmp, pick(template_bounds(), rng));
  return prob(random_event(space, rng), cmp, pick(template_bounds(), rng));
}

Constraint random_constraint(const SpacePtr& space, std::mt19937_64& rng, int depth, bool allow_strict) {
  if (depth <= 0) return random_atom(space, rng, allow_strict);
  switch (uniform(0, 3, rng)) {
    case 0: return random_atom(space, rng, allow_strict);
    case 1: return !random_constraint(space, rng, depth - 1, allow_strict);
    case 2:
      return random_constraint(space, rng, depth - 1, allow_strict) &&
             random_constraint(space, rng, depth - 1, allow_strict);
    default:
      return random_constraint(space, rng, depth - 1, allow_strict) ||
             random_constraint(space, rng, depth - 1, allow_strict);
  }
}

SpacePtr random_space(std::size_t worlds, std::mt19937_64& rng, const std::string& prefix) {
  if (worlds == 0) throw Error("empty space");
  std::size_t k = 1;
  while ((std::size_t(1) << k) < worlds) ++k;
  std::vector<std::string> names;
  for (std::size_t i = 1; i <= k; ++i) names.push_back(prefix + std::to_string(i));
  std::vector<WorldBits> all(std::size_t(1) << k);
  std::iota(all.begin(), all.end(), WorldBits(0));
  std::shuffle(all.begin(), all.end(), rng);
  all.resize(worlds);
  return Space::create(Vocabulary(names), all);
}

SpacePtr one_hot_space(const std::string& prefix, std::size_t k) {
  std::vector<std::string> names;
  std::vector<WorldBits> worlds;
  for (std::size_t i = 0; i < k; ++i) {
    names.push_back(prefix + std::to_string(i + 1));
    worlds.push_back(WorldBits(1) << (k - 1 - i));
  }
  return Space::create(Vocabulary(names), worlds);
}

std::string describe(const Embedding& f) {
  std::ostringstream out;
  out << (f.backing() == Embedding::Backing::kSurjection ? "surjection" : "event-table") << " X("
      << f.source()->size() << " worlds) -> Y(" << f.target()->size() << " worlds) g=[";
  for (std::size_t y = 0; y < f.target()->size(); ++y) {
    auto x = f.world_map(y);
    out << (y ? "," : "") << (x ? std::to_string(*x) : "-");
  }
  out << "]";
  return out.str();
}

InvarianceReport invariance_check(const InferenceProcedure& proc, const Embedding& f, const Constraint& kb,
                                  const Constraint& theta, const InferenceConfig& cfg) {
  return invariance_check(proc, f, {{kb, theta}}, cfg);
}

InvarianceReport invariance_check(const InferenceProcedure& proc, const Embedding& f,
                                  const std::vector<std::pair<Constraint, Constraint>>& corpus,
                                  const InferenceConfig& cfg) {
  if (!f.is_faithful()) throw Error("invariance_check needs a faithful embedding");
  InvarianceReport report;
  report.procedure = proc.name();
  report.embedding = describe(f);
  for (const auto& [kb, theta] : corpus) {
    ++report.pairs_tested;
    auto x = run(proc, kb, theta, cfg);
    auto y = run(proc, translate(f, kb), translate(f, theta), cfg);
    if (x.mode == VerdictMode::kSampled || y.mode == VerdictMode::kSampled) report.mode = VerdictMode::kSampled;
    if (x.label != y.label) report.violations.push_back(make_violation(proc, f, kb, theta, x, y));
  }
  return report;
}

std::vector<Embedding> disjoint_copy_embeddings(const SpacePtr& x, const std::vector<Event>& kb_events, const Event& s,
                                                std::size_t copies) {
  if (copies < 2) throw Error("need at least two copies");
  auto atoms = atoms_over(x, kb_events);
  for (const auto& t : atoms)
    if ((t & s).empty() || (t & ~s).empty()) throw Error("every atom must meet both S and its complement");
  const std::size_t m = atoms.size();
  auto z = one_hot_space("z", m * copies);
  auto y = product_space({x, z});
  std::vector<Embedding> out;
  for (std::size_t j = 0; j < copies; ++j) {
    std::vector<Event> images(x->size(), Event::none(y));
    for (std::size_t i = 0; i < m; ++i) {
      std::vector<std::size_t> block_ij, rest_i;
      for (std::size_t w = 0; w < y->size(); ++w) {
        const std::size_t zc = y->factor_coordinate(w, 1);
        if (zc / copies != i) continue;
        (zc % copies == j ? block_ij : rest_i).push_back(w);
      }
      auto in_s = (atoms[i] & s).worlds();
      auto out_s = (atoms[i] & ~s).worlds();
      auto a = split_evenly(block_ij, in_s.size(), y);
      auto b = split_evenly(rest_i, out_s.size(), y);
      for (std::size_t k = 0; k < in_s.size(); ++k) images[in_s[k]] = a[k];
      for (std::size_t k = 0; k < out_s.size(); ++k) images[out_s[k]] = b[k];
    }
    out.push_back(Embedding::from_images(x, y, std::move(images)));
  }
  return out;
}

InvarianceReport rep_independence_falsify(const InferenceProcedure& proc, const HarnessConfig& cfg) {
  InvarianceReport report;
  report.procedure = proc.name();
  const std::size_t max_worlds = std::max<std::size_t>(2, cfg.max_worlds);
  for (std::size_t t = 0; t < cfg.budget; ++t) {
    const std::uint64_t seed = trial_seed(cfg.seed, t);
    std::mt19937_64 rng(seed);
    const std::size_t nx = uniform(2, std::min<std::size_t>(4, max_worlds), rng);
    const std::size_t ny = uniform(nx, max_worlds, rng);
    auto x = random_space(nx, rng, "x");
    auto y = random_space(ny, rng, "y");
    auto f = random_faithful_embedding(x, y, rng());
    auto [kb, theta] = template_pair(x, cfg.templates, rng);
    InferenceConfig icfg = cfg.inference;
    icfg.seed = seed;
    ++report.trials;
    auto r = invariance_check(proc, f, kb, theta, icfg);
    report.pairs_tested += r.pairs_tested;
    if (r.mode == VerdictMode::kSampled) report.mode = VerdictMode::kSampled;
    if (!r.ok()) {
      // Only report what replays.
      auto again = invariance_check(proc, f, kb, theta, icfg);
      if (!again.ok()) {
        auto v = r.violations.front();
        v.trial_seed = seed;
        report.embedding = v.embedding;
        report.violations.push_back(std::move(v));
        return report;
      }
    }
  }
  if (cfg.gadget_path) {
    auto g = noindep_gadget();
    Selection sel;
    try {
      sel = select(proc, g.kb, cfg.inference);
    } catch (const DomainError&) {
      return report;
    }
    for (const Event& target : {g.s, ~g.s}) {
      for (auto it = template_bounds().rbegin(); it != template_bounds().rend(); ++it) {
        const Rational& alpha = *it;
        if (alpha <= 0 || alpha >= 1) continue;
        auto theta = prob(target, Comparator::kGreater, alpha);
        if (!evaluate(sel, theta, cfg.inference).holds) continue;
        const Rational inv = 1 / alpha;
        mpz_class n = inv.get_num() / inv.get_den() + 1;
        for (const auto& f : disjoint_copy_embeddings(g.xx, {g.s_prime}, target, n.get_ui())) {
          ++report.trials;
          auto r = invariance_check(proc, f, g.kb, theta, cfg.inference);
          report.pairs_tested += r.pairs_tested;
          if (!r.ok()) {
            auto v = r.violations.front();
            v.note = "default-independence gadget: disjoint copies of the queried event";
            report.embedding = v.embedding;
            report.violations.push_back(std::move(v));
            return report;
          }
        }
        break;
      }
    }
  }
  return report;
}

RobustnessReport robustness_check(const InferenceProcedure& proc, const Constraint& kb, const Embedding& lift,
                                  const Constraint& psi, const std::vector<Constraint>& queries,
                                  const InferenceConfig& cfg) {
  RobustnessReport report;
  report.conservative = conservative_check(kb, lift, psi, cfg.entail);
  if (report.conservative.status != Conservativeness::kVerified) {
    report.skipped = true;
    return report;
  }
  auto kb_z = translate(lift, kb) && psi;
  auto sx = select(proc, kb, cfg);
  auto sz = select(proc, kb_z, cfg);
  for (const auto& q : queries) {
    ++report.queries;
    const bool hx = evaluate(sx, q, cfg).holds;
    const bool hz = evaluate(sz, translate(lift, q), cfg).holds;
    if (hx != hz) report.violations.push_back({q.to_string(), hx, hz});
  }
  return report;
}

bool EssentialEntailmentReport::only_unit_interval() const {
  return std::all_of(witnesses.begin(), witnesses.end(),
                     [](const IntervalFinding& w) { return w.alpha == 0 && w.beta == 1; });
}

EssentialEntailmentReport essentially_entailment_probe(const InferenceProcedure& proc, const Constraint& kb,
                                                       const std::vector<Event>& events,
                                                       const std::vector<Rational>& grid, const InferenceConfig& cfg) {
  EssentialEntailmentReport report;
  auto sel = select(proc, kb, cfg);
  for (const auto& s : events)
    for (std::size_t a = 0; a < grid.size(); ++a)
      for (std::size_t b = 0; b < grid.size(); ++b) {
        if (!(grid[a] < grid[b])) continue;
        auto open = prob(s, Comparator::kGreater, grid[a]) && prob(s, Comparator::kLess, grid[b]);
        if (!evaluate(sel, open, cfg).holds || entails(kb, open, cfg.entail)) continue;
        IntervalFinding w{s.to_string(), grid[a], grid[b]};
        report.witnesses.push_back(w);
        auto closed = prob(s, Comparator::kGreaterEq, grid[a]) && prob(s, Comparator::kLessEq, grid[b]);
        if (!entails(kb, closed, cfg.entail)) report.violations.push_back(w);
      }
  return report;
}

NoindepGadget noindep_gadget() {
  auto x = enumerate_worlds(Vocabulary({"x"}));
  auto xx = product_space({x, x});
  Event s = event_of(xx, "x <=> x'");
  Event s_prime = event_of(xx, "x");
  auto kb = prob(s_prime, Comparator::kGreaterEq, Rational(1, 3)) && prob(s_prime, Comparator::kLessEq, Rational(2, 3));
  auto query = prob(s, Comparator::kGreater, Rational(1, 3));
  std::vector<Event> atoms = {s & s_prime, ~s & s_prime, s & ~s_prime, ~s & ~s_prime};
  const bool nonempty = std::none_of(atoms.begin(), atoms.end(), [](const Event& e) { return e.empty(); });
  return NoindepGadget{x, xx, kb, query, s, s_prime, atoms, nonempty};
}

AlmostTrivialGadget almosttrivial2_gadget(std::size_t n, std::size_t d, std::size_t max_worlds) {
  if (d < 2 || d >= n) throw Error("gadget needs 2 <= d < n");
  if (falling(n, d) > static_cast<long>(max_worlds)) throw LimitError("gadget space exceeds max_worlds");
  AlmostTrivialGadget g;
  g.n = n;
  g.d = d;
  const Rational lower = ratio(static_cast<long>(d - 1), static_cast<long>(n - 1));
  const Rational upper = ratio(static_cast<long>(d), static_cast<long>(n));
  g.gamma = lower / 2;
  g.alpha = (upper + 1) / 2;
  g.parameters_ok = g.gamma < lower && lower < upper && upper < g.alpha;
  std::tie(g.y0, g.u) = build_tuple_space(n, d);

  g.worlds = g.y0->size();
  g.u_size = g.u[0].count();
  g.pair_size = (g.u[0] & g.u[1]).count();
  const Rational denom = falling(n, n) / falling(n - d, n - d);  // n!/(n-d)!
  const Rational expected_u = Rational(static_cast<long>(d)) * falling(n - 1, n - 1) / falling(n - d, n - d);
  const Rational expected_pair =
      Rational(static_cast<long>(d * (d - 1))) * falling(n - 2, n - 2) / falling(n - d, n - d);
  g.counts_match = Rational(static_cast<long>(g.worlds)) == denom;
  for (std::size_t i = 0; i < n; ++i) {
    g.counts_match = g.counts_match && Rational(static_cast<long>(g.u[i].count())) == expected_u;
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) g.counts_match = g.counts_match && Rational(static_cast<long>((g.u[i] & g.u[j]).count())) == expected_pair;
  }
  g.sum_identity = true;
  for (std::size_t w = 0; w < g.worlds; ++w) {
    std::size_t hits = 0;
    for (const auto& e : g.u) hits += e.contains(w);
    g.sum_identity = g.sum_identity && hits == d;
  }

  std::vector<Rational> probe = {upper - Rational(1, 10), upper - Rational(1, 100), upper, upper + Rational(1, 100),
                                 g.alpha, Rational(7, 10)};
  g.threshold_exact = true;
  for (const auto& a : probe) {
    if (a < 0 || a >= 1) continue;
    std::vector<Constraint> conj;
    for (const auto& e : g.u) conj.push_back(prob(e, Comparator::kGreater, a));
    const bool infeasible = !satisfiable(Constraint::all_of(g.y0, conj)).feasible;
    g.threshold_probe.emplace_back(a, infeasible);
    g.threshold_exact = g.threshold_exact && infeasible == (a >= upper);
  }
  g.witnesses_exact = true;
  for (std::size_t i = 0; i < n; ++i) {
    auto mu = uniform_on(g.u[i]);
    g.witnesses_exact = g.witnesses_exact && mu.prob(g.u[i]) == 1;
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) g.witnesses_exact = g.witnesses_exact && mu.prob(g.u[j]) == lower;
  }
  return g;
}

SigmaExtensionReport sigma_extension_check(std::size_t n, std::size_t d, const Rational& gamma,
                                           const ExactMeasure& nu, std::size_t i) {
  SigmaExtensionReport report;
  const Rational lower = ratio(static_cast<long>(d - 1), static_cast<long>(n - 1));
  if (!(gamma > 0 && gamma < lower)) throw Error("sigma extension needs 0 < gamma < (d-1)/(n-1)");
  if (i >= n) throw Error("copy index out of range");
  const auto& x = nu.space();
  if (x->size() != 2) throw Error("sigma extension expects a two-world X");
  const Event s = Event::singleton(x, 1);
  auto [y0, u] = build_tuple_space(n, d);

  // mu' on Y0 x Y^n: uniform on U_i times per-copy measures on Y = {y', y}.
  auto yb = enumerate_worlds(Vocabulary({"y"}));
  const ExactMeasure mu0 = uniform_on(u[i]);
  std::vector<ExactMeasure> parts{mu0};
  for (std::size_t j = 0; j < n; ++j) {
    Rational py = j == i ? nu.prob(s) : Rational(gamma / mu0.prob(u[j]));
    parts.push_back(ExactMeasure(yb, {1 - py, py}));
  }
  ExactMeasure mu_prime = product_measure(parts);
  const auto& w_space = mu_prime.space();
  std::vector<Event> v;
  for (std::size_t j = 0; j < n; ++j) {
    Event::Bits b(w_space->size());
    for (std::size_t w = 0; w < w_space->size(); ++w)
      if (u[j].contains(w_space->factor_coordinate(w, 0)) && w_space->factor_coordinate(w, 1 + j) == 1) b.set(w);
    v.emplace_back(w_space, std::move(b));
  }
  report.y_part_exact = true;
  for (std::size_t j = 0; j < n; ++j)
    report.y_part_exact = report.y_part_exact && mu_prime.prob(v[j]) == (j == i ? nu.prob(s) : gamma);

  // Couple one copy of X at a time; copy j gets nu if j == i, else nu0 with nu0(S) = gamma.
  const ExactMeasure nu0(x, {1 - gamma, gamma});
  ExactMeasure mu = mu_prime;
  std::vector<Event> copies_s, iffs;  // events on the current space
  for (std::size_t j = 0; j < n; ++j) {
    const ExactMeasure& marginal = j == i ? nu : nu0;
    ExactMeasure next = couple(marginal, s, mu, v[j]);
    const auto& c = next.space();
    Event iff = iff_event(c, s, v[j]);
    auto lift_old = cylinder_embedding(c, 1);
    for (auto& e : v) e = lift_old.apply(e);
    for (auto& e : copies_s) e = lift_old.apply(e);
    for (auto& e : iffs) e = lift_old.apply(e);
    copies_s.push_back(cylinder_embedding(c, 0).apply(s));
    iffs.push_back(iff);
    mu = std::move(next);
  }
  report.z_worlds = mu.size();
  report.extension_exact = true;
  for (std::size_t j = 0; j < n; ++j) {
    const ExactMeasure& marginal = j == i ? nu : nu0;
    report.extension_exact = report.extension_exact && mu.prob(copies_s[j]) == marginal.prob(s) &&
                             mu.prob(iffs[j]) == 1;
  }
  return report;
}

BootstrapReport bootstrap_check(const std::vector<Measure>& prior_x, const std::vector<Measure>& prior_y,
                                const Embedding& f, const std::vector<std::pair<Constraint, Constraint>>& corpus,
                                const InferenceConfig& cfg) {
  BootstrapReport report;
  report.corresponding = correspond_sets(f, prior_x, prior_y, 1e-9);
  const auto& x = f.source();
  auto proc = InferenceProcedure::prior_based(PriorFunction::finite({{x, prior_x}, {f.target(), prior_y}}), "prior");
  auto pairs = corpus;
  // kb = true selects the priors themselves; these queries pin them down.
  std::vector<Constraint> is_prior;
  for (const auto& mu : prior_x) {
    auto exact = to_exact(mu);
    std::vector<Constraint> coords;
    for (std::size_t w = 0; w < x->size(); ++w) coords.push_back(prob(Event::singleton(x, w), Comparator::kEqual, exact[w]));
    is_prior.push_back(Constraint::all_of(x, coords));
    pairs.emplace_back(Constraint::truth(x), !is_prior.back());
  }
  pairs.emplace_back(Constraint::truth(x), Constraint::any_of(x, is_prior));
  report.invariance = invariance_check(proc, f, pairs, cfg);
  return report;
}

ProductsReport products_invariance_check(std::size_t product_embeddings, std::size_t permutation_embeddings,
                                         const HarnessConfig& cfg) {
  ProductsReport report;
  auto proc = InferenceProcedure::prior_based(PriorFunction::product_family(), "product");
  auto record = [&](const InvarianceReport& r) {
    report.pairs += r.pairs_tested;
    for (const auto& v : r.violations) report.violations.push_back(v);
  };
  for (std::size_t k = 0; k < product_embeddings; ++k) {
    std::mt19937_64 rng(trial_seed(cfg.seed, k));
    std::vector<Embedding> parts;
    const std::size_t factors = uniform(2, 3, rng);
    for (std::size_t i = 0; i < factors; ++i) {
      const std::size_t nx = uniform(2, 3, rng);
      auto xi = one_hot_space(std::string(1, static_cast<char>('a' + i)), nx);
      auto yi = one_hot_space(std::string(1, static_cast<char>('p' + i)), uniform(nx, nx + 2, rng));
      parts.push_back(random_faithful_embedding(xi, yi, rng()));
    }
    auto f = product_embedding(parts);
    std::vector<std::pair<Constraint, Constraint>> corpus;
    for (int c = 0; c < 3; ++c) corpus.push_back(factorised_pair(f.source(), rng));
    record(invariance_check(proc, f, corpus, cfg.inference));
    ++report.product_embeddings;
  }
  for (std::size_t k = 0; k < permutation_embeddings; ++k) {
    std::mt19937_64 rng(trial_seed(cfg.seed ^ 0x5eed, k));
    auto a = one_hot_space("a", uniform(2, 3, rng));
    auto b = one_hot_space("b", uniform(2, 3, rng));
    auto x = product_space({a, a, b});
    std::vector<std::size_t> pi = {0, 1, 2};
    if (rng() & 1) std::swap(pi[0], pi[1]);
    auto f = permutation_embedding(x, pi);
    std::vector<std::pair<Constraint, Constraint>> corpus;
    for (int c = 0; c < 3; ++c) corpus.push_back(factorised_pair(x, rng));
    record(invariance_check(proc, f, corpus, cfg.inference));
    ++report.permutation_embeddings;
  }

  // Factor-crossing bijection (a, b) -> (a, a xor b) on a two-symbol space.
  auto pq = enumerate_worlds(Vocabulary({"a", "b"}));
  Interpretation cross{{"a", parse_formula("a")}, {"b", parse_formula("a <=> !b")}};
  auto f = from_interpretation(cross, pq, pq);
  auto kb = parse_constraint("1/3 <= P(a) <= 2/3 & 1/3 <= P(b) <= 2/3", pq);
  auto theta = parse_constraint("P(a <=> b) > 1/3", pq);
  for (std::size_t t = 0; t < std::max<std::size_t>(1, cfg.budget / 10) && !report.crossing_violation_found; ++t) {
    InferenceConfig icfg = cfg.inference;
    icfg.seed = trial_seed(cfg.seed, 1000000 + t);
    auto r = invariance_check(proc, f, kb, theta, icfg);
    if (!r.ok()) {
      report.crossing_violation_found = true;
      report.crossing_example = r.violations.front();
      report.crossing_example->trial_seed = icfg.seed;
    }
  }
  return report;
}

KlmCorpus random_klm_corpus(std::size_t kbs, std::uint64_t seed, bool closed, std::size_t spaces) {
  KlmCorpus corpus;
  std::mt19937_64 rng(splitmix(seed));
  for (std::size_t k = 0; k < std::max<std::size_t>(1, spaces); ++k)
    corpus.spaces.push_back(random_space(uniform(2, 4, rng), rng, std::string(1, static_cast<char>('p' + k))));
  for (const auto& x : corpus.spaces) {
    corpus.kbs.push_back(Constraint::truth(x));
    for (int t = 0; t < 6; ++t) corpus.thetas.push_back(random_constraint(x, rng, static_cast<int>(uniform(0, 1, rng))));
  }
  for (std::size_t k = 0; k < kbs; ++k) {
    const auto& x = corpus.spaces[k % corpus.spaces.size()];
    if (!closed) {
      corpus.kbs.push_back(random_constraint(x, rng, static_cast<int>(uniform(0, 1, rng))));
      continue;
    }
    // No negation, so every kb denotes a closed set.
    switch (uniform(0, 2, rng)) {
      case 0: corpus.kbs.push_back(random_atom(x, rng, false)); break;
      case 1: corpus.kbs.push_back(random_atom(x, rng, false) && random_atom(x, rng, false)); break;
      default: corpus.kbs.push_back(random_atom(x, rng, false) || random_atom(x, rng, false)); break;
    }
  }
  return corpus;
}

}  // namespace repind
