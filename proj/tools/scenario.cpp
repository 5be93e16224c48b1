#include "scenario.hpp"

#include <algorithm>
#include <set>

#include "repind/constraint.hpp"

namespace repind::cli {
namespace {

[[noreturn]] void fail(const std::string& pointer, const std::string& message) { throw ValidationError(pointer, message); }

const json& require(const json& j, const char* key, const std::string& at) {
  if (!j.is_object()) fail(at, "expected an object");
  auto it = j.find(key);
  if (it == j.end()) fail(at + "/" + key, "missing required field");
  return *it;
}

std::string as_string(const json& j, const std::string& at) {
  if (!j.is_string()) fail(at, "expected a string");
  return j.get<std::string>();
}

std::uint64_t as_unsigned(const json& j, const std::string& at) {
  if (!j.is_number_unsigned() && !(j.is_number_integer() && j.get<std::int64_t>() >= 0))
    fail(at, "expected a non-negative integer");
  return j.get<std::uint64_t>();
}

std::vector<std::string> as_strings(const json& j, const std::string& at) {
  if (!j.is_array()) fail(at, "expected an array of strings");
  std::vector<std::string> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(as_string(j[i], at + "/" + std::to_string(i)));
  return out;
}

void only_keys(const json& j, std::initializer_list<const char*> keys, const std::string& at) {
  if (!j.is_object()) fail(at, "expected an object");
  for (auto it = j.begin(); it != j.end(); ++it)
    if (std::none_of(keys.begin(), keys.end(), [&](const char* k) { return it.key() == k; }))
      fail(at + "/" + pointer_token(it.key()), "unknown field");
}

EmbeddingSpec embedding_from_json(const json& j, const std::string& at) {
  only_keys(j, {"kind", "source", "target", "map", "parts", "pi"}, at);
  EmbeddingSpec e;
  e.kind = as_string(require(j, "kind", at), at + "/kind");
  if (j.contains("source")) e.source = as_string(j["source"], at + "/source");
  if (j.contains("target")) e.target = as_string(j["target"], at + "/target");
  if (e.kind == "surjection" || e.kind == "interpretation") {
    const auto& m = require(j, "map", at);
    if (!m.is_object()) fail(at + "/map", "expected an object");
    for (auto it = m.begin(); it != m.end(); ++it)
      e.map[it.key()] = as_string(it.value(), at + "/map/" + pointer_token(it.key()));
  } else if (e.kind == "product") {
    const auto& parts = require(j, "parts", at);
    if (!parts.is_array() || parts.empty()) fail(at + "/parts", "expected a nonempty array");
    for (std::size_t i = 0; i < parts.size(); ++i)
      e.parts.push_back(embedding_from_json(parts[i], at + "/parts/" + std::to_string(i)));
  } else if (e.kind == "permutation") {
    const auto& pi = require(j, "pi", at);
    if (!pi.is_array()) fail(at + "/pi", "expected an array");
    for (std::size_t i = 0; i < pi.size(); ++i) e.pi.push_back(as_unsigned(pi[i], at + "/pi/" + std::to_string(i)));
  } else {
    fail(at + "/kind", "unknown embedding kind '" + e.kind + "'");
  }
  return e;
}

json embedding_to_json(const EmbeddingSpec& e) {
  json j{{"kind", e.kind}};
  if (e.source) j["source"] = *e.source;
  if (e.target) j["target"] = *e.target;
  if (e.kind == "surjection" || e.kind == "interpretation") j["map"] = e.map;
  if (e.kind == "product") {
    j["parts"] = json::array();
    for (const auto& p : e.parts) j["parts"].push_back(embedding_to_json(p));
  }
  if (e.kind == "permutation") j["pi"] = e.pi;
  return j;
}

const SpacePtr& lookup(const std::map<std::string, SpacePtr>& spaces, const std::string& name, const std::string& at) {
  auto it = spaces.find(name);
  if (it == spaces.end()) fail(at, "unknown space '" + name + "'");
  return it->second;
}

Embedding build_embedding(const EmbeddingSpec& e, const Built& b, const std::string& at) {
  if (e.kind == "product") {
    std::vector<Embedding> parts;
    for (std::size_t i = 0; i < e.parts.size(); ++i)
      parts.push_back(build_embedding(e.parts[i], b, at + "/parts/" + std::to_string(i)));
    try {
      auto f = product_embedding(parts);
      if (e.source && !same_space(lookup(b.spaces, *e.source, at + "/source"), f.source()))
        fail(at + "/source", "is not the product of the part sources");
      if (e.target && !same_space(lookup(b.spaces, *e.target, at + "/target"), f.target()))
        fail(at + "/target", "is not the product of the part targets");
      return f;
    } catch (const ValidationError&) {
      throw;
    } catch (const Error& err) {
      fail(at, err.what());
    }
  }
  const SpacePtr& src = e.source ? lookup(b.spaces, *e.source, at + "/source") : b.space;
  if (e.kind == "permutation") {
    try {
      return permutation_embedding(src, e.pi);
    } catch (const Error& err) {
      fail(at + "/pi", err.what());
    }
  }
  if (!e.target) fail(at + "/target", "missing required field");
  const SpacePtr& dst = lookup(b.spaces, *e.target, at + "/target");
  if (e.kind == "surjection") {
    std::vector<std::size_t> g(dst->size(), src->size());
    for (const auto& [y, x] : e.map) {
      const std::string p = at + "/map/" + pointer_token(y);
      std::size_t yi = 0, xi = 0;
      try {
        std::size_t used = 0;
        yi = std::stoul(y, &used);
        if (used != y.size()) throw std::invalid_argument(y);
        xi = std::stoul(x, &used);
        if (used != x.size()) throw std::invalid_argument(x);
      } catch (const std::exception&) {
        fail(p, "world indices must be decimal integers");
      }
      if (yi >= dst->size()) fail(p, "target world index out of range");
      if (xi >= src->size()) fail(p, "source world index out of range");
      g[yi] = xi;
    }
    for (std::size_t y = 0; y < g.size(); ++y)
      if (g[y] == src->size()) fail(at + "/map", "target world " + std::to_string(y) + " is unmapped");
    try {
      return Embedding::from_surjection(src, dst, g);
    } catch (const Error& err) {
      fail(at + "/map", err.what());
    }
  }
  Interpretation interp;
  for (const auto& [symbol, text] : e.map) {
    try {
      interp.insert_or_assign(symbol, parse_formula(text));
    } catch (const Error& err) {
      fail(at + "/map/" + pointer_token(symbol), err.what());
    }
  }
  try {
    return from_interpretation(interp, src, dst);
  } catch (const Error& err) {
    fail(at + "/map", err.what());
  }
}

}  // namespace

std::string pointer_token(const std::string& key) {
  std::string out;
  for (char c : key) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

Scenario scenario_from_json(const json& j) {
  only_keys(j, {"spaces", "space", "kb", "queries", "procedure", "embeddings", "harness"}, "");
  Scenario s;
  const auto& spaces = require(j, "spaces", "");
  if (!spaces.is_array() || spaces.empty()) fail("/spaces", "expected a nonempty array");
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    const std::string at = "/spaces/" + std::to_string(i);
    only_keys(spaces[i], {"name", "vocabulary", "restriction", "factors"}, at);
    SpaceSpec sp;
    sp.name = as_string(require(spaces[i], "name", at), at + "/name");
    if (spaces[i].contains("factors")) sp.factors = as_strings(spaces[i]["factors"], at + "/factors");
    if (spaces[i].contains("vocabulary") || !sp.factors)
      sp.vocabulary = as_strings(require(spaces[i], "vocabulary", at), at + "/vocabulary");
    if (spaces[i].contains("restriction")) sp.restriction = as_string(spaces[i]["restriction"], at + "/restriction");
    s.spaces.push_back(std::move(sp));
  }
  if (j.contains("space")) s.space = as_string(j["space"], "/space");
  if (j.contains("kb")) s.kb = as_string(j["kb"], "/kb");
  if (j.contains("queries")) s.queries = as_strings(j["queries"], "/queries");
  if (j.contains("procedure")) {
    const auto& p = j["procedure"];
    only_keys(p, {"kind", "prior", "seed"}, "/procedure");
    s.procedure.kind = as_string(require(p, "kind", "/procedure"), "/procedure/kind");
    if (p.contains("seed")) s.procedure.seed = as_unsigned(p["seed"], "/procedure/seed");
    if (p.contains("prior")) {
      const auto& pr = p["prior"];
      only_keys(pr, {"kind", "measures"}, "/procedure/prior");
      PriorSpec prior;
      prior.kind = as_string(require(pr, "kind", "/procedure/prior"), "/procedure/prior/kind");
      if (pr.contains("measures")) {
        const auto& m = pr["measures"];
        if (!m.is_object()) fail("/procedure/prior/measures", "expected an object");
        for (auto it = m.begin(); it != m.end(); ++it) {
          const std::string at = "/procedure/prior/measures/" + pointer_token(it.key());
          if (!it.value().is_array()) fail(at, "expected an array of weight vectors");
          auto& list = prior.measures[it.key()];
          for (std::size_t k = 0; k < it.value().size(); ++k)
            list.push_back(as_strings(it.value()[k], at + "/" + std::to_string(k)));
        }
      }
      s.procedure.prior = std::move(prior);
    }
  }
  if (j.contains("embeddings")) {
    const auto& es = j["embeddings"];
    if (!es.is_array()) fail("/embeddings", "expected an array");
    for (std::size_t i = 0; i < es.size(); ++i)
      s.embeddings.push_back(embedding_from_json(es[i], "/embeddings/" + std::to_string(i)));
  }
  if (j.contains("harness")) {
    const auto& h = j["harness"];
    only_keys(h, {"seed", "budget", "eps", "max_worlds", "templates"}, "/harness");
    HarnessSpec hs;
    if (h.contains("seed")) hs.seed = as_unsigned(h["seed"], "/harness/seed");
    if (h.contains("budget")) hs.budget = as_unsigned(h["budget"], "/harness/budget");
    if (h.contains("max_worlds")) hs.max_worlds = as_unsigned(h["max_worlds"], "/harness/max_worlds");
    if (h.contains("eps")) {
      if (!h["eps"].is_number()) fail("/harness/eps", "expected a number");
      hs.eps = h["eps"].get<double>();
    }
    if (h.contains("templates")) {
      hs.templates = as_string(h["templates"], "/harness/templates");
      if (*hs.templates != "general" && *hs.templates != "objective")
        fail("/harness/templates", "expected 'general' or 'objective'");
    }
    s.harness = hs;
  }
  return s;
}

json to_json(const Scenario& s) {
  json j;
  j["spaces"] = json::array();
  for (const auto& sp : s.spaces) {
    json o{{"name", sp.name}};
    if (!sp.factors || !sp.vocabulary.empty()) o["vocabulary"] = sp.vocabulary;
    if (sp.restriction) o["restriction"] = *sp.restriction;
    if (sp.factors) o["factors"] = *sp.factors;
    j["spaces"].push_back(std::move(o));
  }
  if (s.space) j["space"] = *s.space;
  j["kb"] = s.kb;
  j["queries"] = s.queries;
  json p{{"kind", s.procedure.kind}};
  if (s.procedure.seed) p["seed"] = *s.procedure.seed;
  if (s.procedure.prior) {
    json pr{{"kind", s.procedure.prior->kind}};
    if (!s.procedure.prior->measures.empty()) pr["measures"] = s.procedure.prior->measures;
    p["prior"] = std::move(pr);
  }
  j["procedure"] = std::move(p);
  j["embeddings"] = json::array();
  for (const auto& e : s.embeddings) j["embeddings"].push_back(embedding_to_json(e));
  if (s.harness) {
    json h = json::object();
    if (s.harness->seed) h["seed"] = *s.harness->seed;
    if (s.harness->budget) h["budget"] = *s.harness->budget;
    if (s.harness->eps) h["eps"] = *s.harness->eps;
    if (s.harness->max_worlds) h["max_worlds"] = *s.harness->max_worlds;
    if (s.harness->templates) h["templates"] = *s.harness->templates;
    j["harness"] = std::move(h);
  }
  return j;
}

InferenceProcedure build_procedure(const ProcedureSpec& spec, const std::map<std::string, SpacePtr>& spaces,
                                   const std::string& at) {
  if (spec.kind == "entailment") return InferenceProcedure::entailment();
  if (spec.kind == "maxent") return InferenceProcedure::maxent();
  if (spec.kind == "i0") return InferenceProcedure::i0();
  if (spec.kind == "i1") return InferenceProcedure::i1();
  if (spec.kind == "broken") return broken_procedure(spec.seed.value_or(0));
  if (spec.kind != "prior") fail(at + "/kind", "unknown procedure kind '" + spec.kind + "'");
  if (!spec.prior) fail(at + "/prior", "missing required field");
  const auto& pr = *spec.prior;
  if (pr.kind == "uniform") return InferenceProcedure::prior_based(PriorFunction::uniform(), "uniform-prior");
  if (pr.kind == "product") return InferenceProcedure::prior_based(PriorFunction::product_family(), "product-prior");
  if (pr.kind != "finite") fail(at + "/prior/kind", "unknown prior kind '" + pr.kind + "'");
  PriorFunction::Table table;
  for (const auto& [name, list] : pr.measures) {
    const std::string m_at = at + "/prior/measures/" + pointer_token(name);
    const SpacePtr& space = lookup(spaces, name, m_at);
    if (list.empty()) fail(m_at, "needs at least one measure");
    std::vector<Measure> measures;
    for (std::size_t k = 0; k < list.size(); ++k) {
      const std::string w_at = m_at + "/" + std::to_string(k);
      if (list[k].size() != space->size())
        fail(w_at, "expected " + std::to_string(space->size()) + " weights");
      std::vector<double> w;
      for (std::size_t i = 0; i < list[k].size(); ++i) {
        try {
          Rational q = parse_rational(list[k][i]);
          if (q < 0) fail(w_at + "/" + std::to_string(i), "weights must be non-negative");
          w.push_back(q.get_d());
        } catch (const ValidationError&) {
          throw;
        } catch (const Error& err) {
          fail(w_at + "/" + std::to_string(i), err.what());
        }
      }
      try {
        measures.push_back(Measure::normalized(space, w));
      } catch (const Error& err) {
        fail(w_at, err.what());
      }
    }
    table.emplace_back(space, std::move(measures));
  }
  if (table.empty()) fail(at + "/prior/measures", "a finite prior needs measures");
  return InferenceProcedure::prior_based(PriorFunction::finite(std::move(table)), "finite-prior");
}

Built build(const Scenario& s) {
  Built b;
  for (std::size_t i = 0; i < s.spaces.size(); ++i) {
    const auto& sp = s.spaces[i];
    const std::string at = "/spaces/" + std::to_string(i);
    if (b.spaces.count(sp.name)) fail(at + "/name", "duplicate space name '" + sp.name + "'");
    SpacePtr space;
    try {
      if (sp.factors) {
        if (sp.restriction) fail(at + "/restriction", "a product space cannot carry a restriction");
        std::vector<SpacePtr> parts;
        for (std::size_t k = 0; k < sp.factors->size(); ++k)
          parts.push_back(lookup(b.spaces, (*sp.factors)[k], at + "/factors/" + std::to_string(k)));
        if (parts.size() < 2) fail(at + "/factors", "a product needs at least two factors");
        space = product_space(parts);
        if (!sp.vocabulary.empty() && sp.vocabulary != space->vocabulary().symbols())
          fail(at + "/vocabulary", "does not match the product vocabulary");
      } else {
        std::set<std::string> seen;
        for (std::size_t k = 0; k < sp.vocabulary.size(); ++k) {
          const auto& name = sp.vocabulary[k];
          const std::string v_at = at + "/vocabulary/" + std::to_string(k);
          if (name.empty() || !is_identifier_start(name[0]) ||
              !std::all_of(name.begin(), name.end(), [](char c) { return is_identifier_char(c); }))
            fail(v_at, "invalid symbol '" + name + "'");
          if (!seen.insert(name).second) fail(v_at, "duplicate symbol '" + name + "'");
        }
        if (sp.vocabulary.empty()) fail(at + "/vocabulary", "needs at least one symbol");
        if (sp.vocabulary.size() > kMaxVocabularySize) fail(at + "/vocabulary", "too many symbols");
        try {
          space = enumerate_worlds(sp.vocabulary, sp.restriction.value_or(""));
        } catch (const Error& err) {
          fail(at + (sp.restriction ? "/restriction" : "/vocabulary"), err.what());
        }
      }
    } catch (const ValidationError&) {
      throw;
    } catch (const Error& err) {
      fail(at, err.what());
    }
    b.spaces[sp.name] = space;
  }
  b.space = s.space ? lookup(b.spaces, *s.space, "/space") : b.spaces.at(s.spaces.front().name);
  try {
    b.kb = parse_constraint(s.kb, b.space);
  } catch (const Error& err) {
    fail("/kb", err.what());
  }
  for (std::size_t i = 0; i < s.queries.size(); ++i) {
    try {
      b.queries.push_back(parse_constraint(s.queries[i], b.space));
    } catch (const Error& err) {
      fail("/queries/" + std::to_string(i), err.what());
    }
  }
  b.procedure = build_procedure(s.procedure, b.spaces);
  for (std::size_t i = 0; i < s.embeddings.size(); ++i)
    b.embeddings.push_back(build_embedding(s.embeddings[i], b, "/embeddings/" + std::to_string(i)));
  return b;
}

}  // namespace repind::cli
