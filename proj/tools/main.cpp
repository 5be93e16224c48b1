#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "repind/harness.hpp"
#include "reproduce.hpp"
#include "scenario.hpp"

#ifndef REPIND_GOLDEN_DIR
#define REPIND_GOLDEN_DIR "data/golden"
#endif

namespace {

using namespace repind;
using namespace repind::cli;

struct Globals {
  std::uint64_t seed = 0;
  std::size_t budget = 1000;
  double eps = 1e-8;
  std::size_t max_worlds = 8;
  std::string format = "text";
  bool seed_set = false, budget_set = false, eps_set = false, max_worlds_set = false;
};

void render_text(std::ostream& out, const json& j, int indent = 0) {
  const std::string pad(indent, ' ');
  if (j.is_object()) {
    for (auto it = j.begin(); it != j.end(); ++it) {
      if (it.value().is_structured() && !it.value().empty()) {
        out << pad << it.key() << ":\n";
        render_text(out, it.value(), indent + 2);
      } else {
        out << pad << it.key() << ": " << (it.value().is_string() ? it.value().get<std::string>() : it.value().dump())
            << "\n";
      }
    }
  } else if (j.is_array()) {
    const bool scalars = std::none_of(j.begin(), j.end(), [](const json& e) { return e.is_structured(); });
    if (scalars) {
      out << pad << j.dump() << "\n";
      return;
    }
    for (std::size_t i = 0; i < j.size(); ++i) {
      out << pad << "- [" << i << "]\n";
      render_text(out, j[i], indent + 2);
    }
  } else {
    out << pad << (j.is_string() ? j.get<std::string>() : j.dump()) << "\n";
  }
}

void emit(const Globals& g, const json& report) {
  if (g.format == "json") std::cout << report.dump(2) << "\n";
  else render_text(std::cout, report);
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("", "cannot open scenario file '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("", std::string("invalid JSON: ") + e.what());
  }
  return scenario_from_json(j);
}

/// Global flags override the scenario's harness block; otherwise the block overrides the defaults.
void apply_harness(Globals& g, const Scenario& s) {
  if (!s.harness) return;
  if (!g.seed_set && s.harness->seed) g.seed = *s.harness->seed;
  if (!g.budget_set && s.harness->budget) g.budget = *s.harness->budget;
  if (!g.eps_set && s.harness->eps) g.eps = *s.harness->eps;
  if (!g.max_worlds_set && s.harness->max_worlds) g.max_worlds = *s.harness->max_worlds;
}

InferenceConfig inference_config(const Globals& g) {
  InferenceConfig cfg;
  cfg.eps = g.eps;
  cfg.seed = g.seed;
  return cfg;
}

InferenceProcedure named_procedure(const std::string& name, std::uint64_t seed) {
  if (name == "uniform-prior") return InferenceProcedure::prior_based(PriorFunction::uniform(), "uniform-prior");
  if (name == "product-prior") return InferenceProcedure::prior_based(PriorFunction::product_family(), "product-prior");
  ProcedureSpec spec;
  spec.kind = name;
  spec.seed = seed;
  return build_procedure(spec, {}, "/procedure");
}

json verdict_json(const Verdict& v) {
  json j{{"holds", v.holds}, {"mode", v.mode == VerdictMode::kExact ? "exact" : "sampled"}};
  if (v.exact_witness) j["witness"] = to_string(*v.exact_witness);
  else if (v.witness) j["witness"] = v.witness->weights();
  if (v.mode == VerdictMode::kSampled) {
    j["samples"] = v.samples;
    j["seed"] = v.seed;
  }
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json violation_json(const InvarianceViolation& v) {
  json j{{"kb", v.kb},         {"theta", v.theta},         {"kb_translated", v.kb_translated},
         {"theta_translated", v.theta_translated}, {"verdict_x", v.verdict_x}, {"verdict_y", v.verdict_y},
         {"embedding", v.embedding}};
  if (v.trial_seed) j["trial_seed"] = v.trial_seed;
  if (!v.note.empty()) j["note"] = v.note;
  return j;
}

json invariance_json(const InvarianceReport& r) {
  json j{{"procedure", r.procedure},
         {"embedding", r.embedding},
         {"trials", r.trials},
         {"pairs_tested", r.pairs_tested},
         {"mode", r.mode == VerdictMode::kExact ? "exact" : "sampled"},
         {"violations", json::array()}};
  for (const auto& v : r.violations) j["violations"].push_back(violation_json(v));
  return j;
}

const char* selection_kind(Selection::Kind k) {
  switch (k) {
    case Selection::Kind::kDenotation: return "denotation";
    case Selection::Kind::kFinite: return "finite";
    case Selection::Kind::kProductFamily: return "product-family";
    case Selection::Kind::kSampled: return "sampled";
  }
  return "?";
}

int cmd_infer(Globals& g, const std::string& path) {
  auto s = load_scenario(path);
  apply_harness(g, s);
  auto b = build(s);
  auto cfg = inference_config(g);
  auto sel = select(*b.procedure, *b.kb, cfg);
  json report{{"procedure", b.procedure->name()}, {"kb", b.kb->to_string()}};
  json sj{{"kind", selection_kind(sel.kind)}};
  if (!sel.measures.empty()) {
    sj["measures"] = json::array();
    for (const auto& m : sel.measures) sj["measures"].push_back(m.weights());
  }
  if (!sel.note.empty()) sj["note"] = sel.note;
  report["selection"] = sj;
  if (sel.empty) {
    report["consistency_violation"] = "kb is unsatisfiable: the selection is empty, so even false would be inferred";
    emit(g, report);
    return 1;
  }
  bool all = true;
  report["queries"] = json::array();
  for (std::size_t i = 0; i < b.queries.size(); ++i) {
    auto v = evaluate(sel, b.queries[i], cfg);
    json q = verdict_json(v);
    q["query"] = s.queries[i];
    report["queries"].push_back(q);
    all = all && v.holds;
  }
  report["all_hold"] = all;
  emit(g, report);
  return all ? 0 : 1;
}

int cmd_check_embedding(Globals& g, const std::string& path) {
  auto s = load_scenario(path);
  auto b = build(s);
  if (b.embeddings.empty()) throw ValidationError("/embeddings", "no embeddings to check");
  json report{{"embeddings", json::array()}};
  bool all = true;
  for (std::size_t i = 0; i < b.embeddings.size(); ++i) {
    const auto& f = b.embeddings[i];
    const bool faithful = f.is_faithful();
    all = all && faithful;
    report["embeddings"].push_back({{"index", i},
                                    {"kind", s.embeddings[i].kind},
                                    {"source_worlds", f.source()->size()},
                                    {"target_worlds", f.target()->size()},
                                    {"faithful", faithful},
                                    {"description", describe(f)}});
  }
  report["all_faithful"] = all;
  emit(g, report);
  return all ? 0 : 1;
}

int cmd_check_invariance(Globals& g, const std::string& path) {
  auto s = load_scenario(path);
  apply_harness(g, s);
  auto b = build(s);
  if (b.embeddings.empty()) throw ValidationError("/embeddings", "no embeddings to check");
  if (b.queries.empty()) throw ValidationError("/queries", "no queries to check");
  auto cfg = inference_config(g);
  std::vector<std::pair<Constraint, Constraint>> corpus;
  for (const auto& q : b.queries) corpus.emplace_back(*b.kb, q);
  json report{{"procedure", b.procedure->name()}, {"reports", json::array()}};
  bool ok = true;
  for (std::size_t i = 0; i < b.embeddings.size(); ++i) {
    if (!same_space(b.embeddings[i].source(), b.space))
      throw ValidationError("/embeddings/" + std::to_string(i), "source is not the kb's space");
    auto r = invariance_check(*b.procedure, b.embeddings[i], corpus, cfg);
    ok = ok && r.ok();
    report["reports"].push_back(invariance_json(r));
  }
  report["invariant"] = ok;
  emit(g, report);
  return ok ? 0 : 1;
}

int cmd_falsify(Globals& g, const std::string& path, const std::string& procedure, const std::string& templates,
                bool gadget) {
  std::optional<InferenceProcedure> proc;
  HarnessConfig hc;
  if (!path.empty()) {
    auto s = load_scenario(path);
    apply_harness(g, s);
    if (s.harness && s.harness->templates && templates.empty())
      hc.templates = *s.harness->templates == "objective" ? HarnessConfig::Templates::kObjective
                                                           : HarnessConfig::Templates::kGeneral;
    if (procedure.empty()) proc = build(s).procedure;
  }
  if (!procedure.empty()) proc = named_procedure(procedure, g.seed);
  if (!proc) throw ValidationError("/procedure", "give --procedure or a scenario");
  if (templates == "objective") hc.templates = HarnessConfig::Templates::kObjective;
  else if (!templates.empty() && templates != "general") throw ValidationError("", "unknown template set '" + templates + "'");
  hc.inference = inference_config(g);
  hc.budget = g.budget;
  hc.seed = g.seed;
  hc.max_worlds = g.max_worlds;
  hc.gadget_path = gadget;
  auto r = rep_independence_falsify(*proc, hc);
  json report = invariance_json(r);
  report["seed"] = g.seed;
  report["budget"] = g.budget;
  report["violation_found"] = !r.ok();
  emit(g, report);
  return r.ok() ? 0 : 1;
}

int cmd_reproduce(Globals& g, const std::string& name, const std::string& golden_dir, bool write) {
  auto cfg = inference_config(g);
  json actual = reproduce(name, cfg);
  const auto file = std::filesystem::path(golden_dir) / (name + ".json");
  json report{{"result", actual}, {"golden", file.string()}};
  if (write) {
    std::filesystem::create_directories(file.parent_path());
    std::ofstream(file) << actual.dump(2) << "\n";
    report["golden_written"] = true;
    emit(g, report);
    return 0;
  }
  std::ifstream in(file);
  if (!in) {
    report["golden_match"] = false;
    report["differences"] = {"golden file missing; rerun with --write-golden"};
    emit(g, report);
    return 1;
  }
  auto diffs = golden_diff(json::parse(in), actual);
  report["golden_match"] = diffs.empty();
  if (!diffs.empty()) report["differences"] = diffs;
  emit(g, report);
  return diffs.empty() ? 0 : 1;
}

int cmd_klm(Globals& g, const std::string& path, const std::string& procedure, std::size_t kbs) {
  std::optional<InferenceProcedure> proc;
  std::vector<Constraint> kb_list, thetas;
  if (!path.empty()) {
    auto s = load_scenario(path);
    apply_harness(g, s);
    auto b = build(s);
    proc = b.procedure;
    kb_list.push_back(*b.kb);
    for (const auto& q : b.queries) {
      kb_list.push_back(q);
      thetas.push_back(q);
    }
  } else {
    auto corpus = random_klm_corpus(kbs, g.seed);
    kb_list = corpus.kbs;
    thetas = corpus.thetas;
  }
  if (!procedure.empty()) proc = named_procedure(procedure, g.seed);
  if (!proc) throw ValidationError("/procedure", "give --procedure or a scenario");
  auto r = klm_properties_check(*proc, kb_list, thetas, inference_config(g));
  json report{{"procedure", r.procedure}, {"kbs", kb_list.size()}, {"out_of_domain", r.out_of_domain}};
  json props = json::object();
  for (const auto& p : kKlmProperties)
    props[p] = {{"checks", r.checks.count(p) ? r.checks.at(p) : 0}, {"holds", r.holds(p)}};
  report["properties"] = props;
  report["violations"] = json::array();
  for (const auto& v : r.violations)
    report["violations"].push_back({{"property", v.property}, {"kb", v.kb}, {"theta", v.theta}, {"other", v.other}});
  report["all_hold"] = r.all_hold();
  emit(g, report);
  return r.all_hold() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inference procedures over finite probability spaces, with representation-independence checks"};
  app.require_subcommand(1);
  app.fallthrough();
  Globals g;
  auto* seed = app.add_option("--seed", g.seed, "Base random seed");
  auto* budget = app.add_option("--budget", g.budget, "Falsification trials");
  auto* eps = app.add_option("--eps", g.eps, "Tolerance for float verdicts");
  auto* max_worlds = app.add_option("--max-worlds", g.max_worlds, "Largest random space");
  app.add_option("--format", g.format, "Output format")->check(CLI::IsMember({"text", "json"}));

  std::string scenario, procedure, templates, name, golden_dir = REPIND_GOLDEN_DIR;
  bool gadget = false, write_golden = false;
  std::size_t kbs = 50;

  auto* infer = app.add_subcommand("infer", "Evaluate the scenario's queries under its procedure");
  infer->add_option("scenario", scenario, "Scenario JSON file")->required();
  auto* check_emb = app.add_subcommand("check-embedding", "Report faithfulness of the scenario's embeddings");
  check_emb->add_option("scenario", scenario, "Scenario JSON file")->required();
  auto* check_inv = app.add_subcommand("check-invariance", "Check the procedure is invariant under each embedding");
  check_inv->add_option("scenario", scenario, "Scenario JSON file")->required();
  auto* falsify = app.add_subcommand("falsify", "Search for a representation-independence violation");
  falsify->add_option("scenario", scenario, "Scenario JSON file (procedure and harness settings)");
  falsify->add_option("--procedure", procedure, "entailment, maxent, i0, i1, uniform-prior, product-prior, broken");
  falsify->add_option("--templates", templates, "general or objective");
  falsify->add_flag("--gadget", gadget, "Also try the disjoint-copies construction");
  auto* repro = app.add_subcommand("reproduce", "Run a bundled reproduction and compare it with its golden file");
  repro->add_option("name", name, "Reproduction name")->required()->check(CLI::IsMember(reproduction_names()));
  repro->add_option("--golden-dir", golden_dir, "Directory of golden files");
  repro->add_flag("--write-golden", write_golden, "Overwrite the golden file with this run");
  auto* klm = app.add_subcommand("klm-check", "Check the five KLM properties on a corpus");
  klm->add_option("scenario", scenario, "Scenario JSON file (kb and queries form the corpus)");
  klm->add_option("--procedure", procedure, "Procedure name (overrides the scenario)");
  klm->add_option("--kbs", kbs, "Size of the random corpus when no scenario is given");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }
  g.seed_set = seed->count() > 0;
  g.budget_set = budget->count() > 0;
  g.eps_set = eps->count() > 0;
  g.max_worlds_set = max_worlds->count() > 0;

  try {
    if (*infer) return cmd_infer(g, scenario);
    if (*check_emb) return cmd_check_embedding(g, scenario);
    if (*check_inv) return cmd_check_invariance(g, scenario);
    if (*falsify) return cmd_falsify(g, scenario, procedure, templates, gadget);
    if (*repro) return cmd_reproduce(g, name, golden_dir, write_golden);
    if (*klm) return cmd_klm(g, scenario, procedure, kbs);
  } catch (const ValidationError& e) {
    json err{{"error", "validation"}, {"pointer", e.pointer()}, {"message", e.what()}};
    if (g.format == "json") std::cout << err.dump(2) << "\n";
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const DomainError& e) {
    if (g.format == "json") std::cout << json{{"error", "domain"}, {"message", e.what()}}.dump(2) << "\n";
    std::cerr << "domain error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    if (g.format == "json") std::cout << json{{"error", "failure"}, {"message", e.what()}}.dump(2) << "\n";
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 2;
}
