#include "reproduce.hpp"

#include <cmath>

#include "repind/harness.hpp"
#include "scenario.hpp"

namespace repind::cli {
namespace {

using json = nlohmann::ordered_json;

SpacePtr space_of(std::vector<std::string> symbols, const std::string& restriction = "") {
  return enumerate_worlds(symbols, restriction);
}

double maxent_prob(const SpacePtr& space, const std::string& kb, const std::string& event) {
  auto r = maxent(parse_constraint(kb, space));
  if (r.status != ProjectionStatus::kAttained) throw Error("maxent not attained for '" + kb + "'");
  return r.measures.front().prob(event_of(space, event));
}

json colorful(const InferenceConfig& cfg) {
  auto x1 = space_of({"colorful"});
  auto x2 = space_of({"red", "blue", "green"});
  json rows = json::array();
  rows.push_back({{"space", "colorful"}, {"worlds", x1->size()}, {"event", "colorful"},
                  {"probability", maxent_prob(x1, "true", "colorful")}});
  rows.push_back({{"space", "red,blue,green"}, {"worlds", x2->size()}, {"event", "red | blue | green"},
                  {"probability", maxent_prob(x2, "true", "red | blue | green")}});
  auto f = from_interpretation({{"colorful", parse_formula("red | blue | green")}}, x1, x2);
  auto kb = Constraint::truth(x1);
  auto theta = parse_constraint("P(colorful) = 1/2", x1);
  auto me = invariance_check(InferenceProcedure::maxent(), f, kb, theta, cfg);
  auto en = invariance_check(InferenceProcedure::entailment(), f, kb, theta, cfg);
  json out{{"reproduction", "colorful"}, {"rows", rows}, {"query", theta.to_string()}};
  out["maxent_invariant"] = me.ok();
  if (!me.ok()) out["maxent_violation"] = {{"x", me.violations[0].verdict_x}, {"y", me.violations[0].verdict_y}};
  out["entailment_invariant"] = en.ok();
  return out;
}

json flying_bird(const InferenceConfig&) {
  auto four = space_of({"fly", "bird"});
  auto three = space_of({"flying-bird", "bird"}, "flying-bird => bird");
  json rows = json::array();
  rows.push_back({{"space", "fly,bird"}, {"worlds", four->size()}, {"kb", "P(fly | bird) = 1/2"},
                  {"probability", maxent_prob(four, "P(fly | bird) = 1/2", "bird")}});
  rows.push_back({{"space", "flying-bird,bird"}, {"worlds", three->size()}, {"kb", "P(flying-bird | bird) = 1/2"},
                  {"probability", maxent_prob(three, "P(flying-bird | bird) = 1/2", "bird")}});
  return {{"reproduction", "flying-bird"}, {"event", "bird"}, {"rows", rows}};
}

json maxent_undefined(const InferenceConfig&) {
  auto x = space_of({"x1"});
  json rows = json::array();
  for (const char* kb : {"P(x1) < 1/2", "P(x1) < 2/3"}) {
    auto r = maxent(parse_constraint(kb, x));
    json row{{"kb", kb}, {"status", to_string(r.status)}};
    if (r.status == ProjectionStatus::kAttained) row["measure"] = r.measures.front().weights();
    rows.push_back(std::move(row));
  }
  return {{"reproduction", "maxent-undefined"}, {"rows", rows}};
}

json noindep(const InferenceConfig& cfg) {
  auto g = noindep_gadget();
  json out{{"reproduction", "noindep"}, {"kb", g.kb.to_string()}, {"query", g.query.to_string()}};
  out["maxent"] = infers(InferenceProcedure::maxent(), g.kb, g.query, cfg).holds;
  out["entailment"] = infers(InferenceProcedure::entailment(), g.kb, g.query, cfg).holds;
  auto product = InferenceProcedure::prior_based(PriorFunction::product_family(), "product-prior");
  out["product_prior"] = infers(product, g.kb, g.query, cfg).holds;
  auto sel = select(product, g.kb, cfg);
  std::string best = "none";
  for (const auto& a : template_bounds()) {
    if (a <= 0 || a >= 1) continue;
    if (evaluate(sel, prob(g.s, Comparator::kGreater, a), cfg).holds) best = to_string(a);
  }
  out["product_prior_largest_lower_bound"] = best;
  HarnessConfig hc;
  hc.inference = cfg;
  hc.budget = 0;
  hc.gadget_path = true;
  auto r = rep_independence_falsify(product, hc);
  out["disjoint_copy_violation"] = !r.ok();
  if (!r.ok()) out["violation"] = {{"theta", r.violations[0].theta}, {"x", r.violations[0].verdict_x},
                                   {"y", r.violations[0].verdict_y}};
  return out;
}

json gadget_3_2(const InferenceConfig&) {
  auto g = almosttrivial2_gadget(3, 2);
  json probe = json::array();
  for (const auto& [a, infeasible] : g.threshold_probe) probe.push_back({{"alpha", to_string(a)}, {"infeasible", infeasible}});
  auto x = space_of({"x"});
  ExactMeasure nu(x, {Rational(2, 5), Rational(3, 5)});
  auto sigma = sigma_extension_check(3, 2, g.gamma, nu, 0);
  return {{"reproduction", "gadget-3-2"},
          {"n", 3},
          {"d", 2},
          {"worlds", g.worlds},
          {"u_size", g.u_size},
          {"pair_size", g.pair_size},
          {"counts_match", g.counts_match},
          {"threshold", "2/3"},
          {"threshold_probe", probe},
          {"threshold_exact", g.threshold_exact},
          {"witnesses_exact", g.witnesses_exact},
          {"gamma", to_string(g.gamma)},
          {"alpha", to_string(g.alpha)},
          {"extension_worlds", sigma.z_worlds},
          {"extension_exact", sigma.ok()}};
}

json bootstrap_uniform(const InferenceConfig& cfg) {
  auto x = space_of({"x"});
  auto y = space_of({"y1", "y2"});
  auto equal = Embedding::from_surjection(x, y, {0, 0, 1, 1});
  std::vector<std::pair<Constraint, Constraint>> corpus = {
      {Constraint::truth(x), parse_constraint("P(x) = 1/2", x)},
      {parse_constraint("P(x) >= 3/4", x), parse_constraint("P(x) = 3/4", x)},
      {parse_constraint("P(x) <= 1/3", x), parse_constraint("P(x) > 1/4", x)}};
  auto a = bootstrap_check({Measure::uniform(x)}, {Measure::uniform(y)}, equal, corpus, cfg);
  auto c1 = space_of({"colorful"});
  auto c3 = space_of({"red", "blue", "green"});
  auto colorful = from_interpretation({{"colorful", parse_formula("red | blue | green")}}, c1, c3);
  auto b = bootstrap_check({Measure::uniform(c1)}, {Measure::uniform(c3)}, colorful,
                           {{Constraint::truth(c1), parse_constraint("P(colorful) = 1/2", c1)}}, cfg);
  auto row = [](const char* name, const BootstrapReport& r) {
    json j{{"embedding", name},
           {"corresponding", r.corresponding},
           {"invariant", r.invariance.ok()},
           {"pairs", r.invariance.pairs_tested},
           {"biconditional", r.biconditional_holds()}};
    if (!r.invariance.ok()) j["example"] = {{"kb", r.invariance.violations[0].kb}, {"theta", r.invariance.violations[0].theta}};
    return j;
  };
  return {{"reproduction", "bootstrap-uniform"}, {"rows", {row("equal-fibers", a), row("colorful", b)}}};
}

}  // namespace

const std::vector<std::string>& reproduction_names() {
  static const std::vector<std::string> names = {"colorful", "flying-bird", "maxent-undefined",
                                                 "noindep",  "gadget-3-2",  "bootstrap-uniform"};
  return names;
}

json reproduce(const std::string& name, const InferenceConfig& cfg) {
  if (name == "colorful") return colorful(cfg);
  if (name == "flying-bird") return flying_bird(cfg);
  if (name == "maxent-undefined") return maxent_undefined(cfg);
  if (name == "noindep") return noindep(cfg);
  if (name == "gadget-3-2") return gadget_3_2(cfg);
  if (name == "bootstrap-uniform") return bootstrap_uniform(cfg);
  throw ValidationError("", "unknown reproduction '" + name + "'");
}

std::vector<std::string> golden_diff(const json& expected, const json& actual, double tol, const std::string& at) {
  std::vector<std::string> out;
  const std::string where = at.empty() ? "/" : at;
  if (expected.is_number() && actual.is_number()) {
    const double e = expected.get<double>(), a = actual.get<double>();
    if (!(std::abs(e - a) <= tol)) out.push_back(where + ": expected " + expected.dump() + ", got " + actual.dump());
    return out;
  }
  if (expected.type() != actual.type()) {
    out.push_back(where + ": expected " + expected.dump() + ", got " + actual.dump());
    return out;
  }
  if (expected.is_object()) {
    for (auto it = expected.begin(); it != expected.end(); ++it) {
      const std::string p = at + "/" + pointer_token(it.key());
      if (!actual.contains(it.key())) out.push_back(p + ": missing");
      else for (auto& d : golden_diff(it.value(), actual[it.key()], tol, p)) out.push_back(d);
    }
    for (auto it = actual.begin(); it != actual.end(); ++it)
      if (!expected.contains(it.key())) out.push_back(at + "/" + pointer_token(it.key()) + ": unexpected");
  } else if (expected.is_array()) {
    if (expected.size() != actual.size()) {
      out.push_back(where + ": expected " + std::to_string(expected.size()) + " elements, got " +
                    std::to_string(actual.size()));
      return out;
    }
    for (std::size_t i = 0; i < expected.size(); ++i)
      for (auto& d : golden_diff(expected[i], actual[i], tol, at + "/" + std::to_string(i))) out.push_back(d);
  } else if (expected != actual) {
    out.push_back(where + ": expected " + expected.dump() + ", got " + actual.dump());
  }
  return out;
}

}  // namespace repind::cli
