#include "repind/constraint.hpp"

#include <algorithm>

#include <cctype>
#include <optional>

#include "repind/error.hpp"

namespace repind {

std::string to_string(Comparator c) {
  switch (c) {
    case Comparator::kLess: return "<";
    case Comparator::kLessEq: return "<=";
    case Comparator::kEqual: return "=";
    case Comparator::kGreaterEq: return ">=";
    case Comparator::kGreater: return ">";
  }
  return "?";
}

Comparator negate(Comparator c) {
  switch (c) {
    case Comparator::kLess: return Comparator::kGreaterEq;
    case Comparator::kLessEq: return Comparator::kGreater;
    case Comparator::kGreaterEq: return Comparator::kLess;
    case Comparator::kGreater: return Comparator::kLessEq;
    case Comparator::kEqual: break;
  }
  throw Error("equality has no single negated comparator");
}

Comparator mirror(Comparator c) {
  switch (c) {
    case Comparator::kLess: return Comparator::kGreater;
    case Comparator::kLessEq: return Comparator::kGreaterEq;
    case Comparator::kGreaterEq: return Comparator::kLessEq;
    case Comparator::kGreater: return Comparator::kLess;
    case Comparator::kEqual: return Comparator::kEqual;
  }
  return c;
}

std::vector<Rational> LinearAtom::coefficients(const SpacePtr& space) const {
  std::vector<Rational> a(space->size(), Rational(0));
  for (const auto& t : terms)
    for (auto w : t.event.worlds()) a[w] += t.coefficient;
  return a;
}

// Construction ---------------------------------------------------------------

namespace {

void require_event_space(const Event& e, const SpacePtr& space) {
  if (!same_space(e.space(), space)) throw Error("constraint mentions an event from another space");
}

}  // namespace

Constraint Constraint::truth(SpacePtr space) {
  return Constraint(std::make_shared<const Node>(Node{Kind::kTrue, std::move(space), {}, {}}));
}

Constraint Constraint::falsity(SpacePtr space) {
  return Constraint(std::make_shared<const Node>(Node{Kind::kFalse, std::move(space), {}, {}}));
}

Constraint Constraint::linear(SpacePtr space, LinearAtom atom) {
  for (const auto& t : atom.terms) require_event_space(t.event, space);
  return Constraint(std::make_shared<const Node>(Node{Kind::kLinear, std::move(space), std::move(atom), {}}));
}

Constraint Constraint::product(SpacePtr space, ProductAtom atom) {
  require_event_space(atom.lhs, space);
  require_event_space(atom.left, space);
  require_event_space(atom.right, space);
  return Constraint(std::make_shared<const Node>(Node{Kind::kProduct, std::move(space), std::move(atom), {}}));
}

Constraint Constraint::negation(const Constraint& c) {
  return Constraint(std::make_shared<const Node>(Node{Kind::kNot, c.space(), {}, {c}}));
}

Constraint Constraint::all_of(SpacePtr space, std::vector<Constraint> cs) {
  for (const auto& c : cs)
    if (!same_space(c.space(), space)) throw Error("conjunction of constraints on different spaces");
  if (cs.empty()) return truth(std::move(space));
  if (cs.size() == 1) return cs.front();
  return Constraint(std::make_shared<const Node>(Node{Kind::kAnd, std::move(space), {}, std::move(cs)}));
}

Constraint Constraint::any_of(SpacePtr space, std::vector<Constraint> cs) {
  for (const auto& c : cs)
    if (!same_space(c.space(), space)) throw Error("disjunction of constraints on different spaces");
  if (cs.empty()) return falsity(std::move(space));
  if (cs.size() == 1) return cs.front();
  return Constraint(std::make_shared<const Node>(Node{Kind::kOr, std::move(space), {}, std::move(cs)}));
}

bool Constraint::has_product_atoms() const {
  if (kind() == Kind::kProduct) return true;
  for (const auto& c : children())
    if (c.has_product_atoms()) return true;
  return false;
}

std::vector<Event> Constraint::events() const {
  std::vector<Event> out;
  switch (kind()) {
    case Kind::kLinear:
      for (const auto& t : linear_atom().terms) out.push_back(t.event);
      break;
    case Kind::kProduct:
      out = {product_atom().lhs, product_atom().left, product_atom().right};
      break;
    default:
      for (const auto& c : children()) {
        auto sub = c.events();
        out.insert(out.end(), sub.begin(), sub.end());
      }
  }
  return out;
}

std::string Constraint::to_string() const {
  switch (kind()) {
    case Kind::kTrue: return "true";
    case Kind::kFalse: return "false";
    case Kind::kLinear: {
      const auto& a = linear_atom();
      std::string s;
      for (std::size_t i = 0; i < a.terms.size(); ++i) {
        const auto& t = a.terms[i];
        Rational c = t.coefficient;
        if (i > 0) {
          s += c < 0 ? " - " : " + ";
          if (c < 0) c = -c;
        } else if (c < 0) {
          s += "-";
          c = -c;
        }
        if (c != 1) s += repind::to_string(c) + "*";
        s += "P(" + t.event.to_string() + ")";
      }
      if (a.terms.empty()) s = "0";
      return s + " " + repind::to_string(a.comparator) + " " + repind::to_string(a.bound);
    }
    case Kind::kProduct: {
      const auto& p = product_atom();
      return "P(" + p.lhs.to_string() + ") = P(" + p.left.to_string() + ") * P(" + p.right.to_string() + ")";
    }
    case Kind::kNot: return "!(" + children()[0].to_string() + ")";
    case Kind::kAnd:
    case Kind::kOr: {
      std::string s = "(";
      for (std::size_t i = 0; i < children().size(); ++i) {
        if (i) s += kind() == Kind::kAnd ? " & " : " | ";
        s += children()[i].to_string();
      }
      return s + ")";
    }
  }
  return {};
}

Constraint prob(const Event& s, Comparator cmp, const Rational& bound) {
  return Constraint::linear(s.space(), LinearAtom{{LinearTerm{1, s}}, cmp, bound});
}

Constraint conditional_prob(const Event& s, const Event& given, Comparator cmp, const Rational& bound) {
  return Constraint::linear(s.space(),
                            LinearAtom{{LinearTerm{1, s & given}, LinearTerm{-bound, given}}, cmp, Rational(0)});
}

// Parsing --------------------------------------------------------------------

namespace {

struct ProbRef {
  Event event;
  std::optional<Event> given;
  std::size_t position;
};

/// A product of primaries: coefficient times zero, one or two probabilities.
struct Monomial {
  Rational coefficient = 1;
  std::vector<ProbRef> probs;
};

class ConstraintParser {
 public:
  ConstraintParser(std::string_view text, SpacePtr space) : text_(text), space_(std::move(space)) {}

  Constraint parse() {
    Constraint c = parse_disjunction();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return c;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool peek(std::string_view s) {
    skip_space();
    return text_.substr(pos_, s.size()) == s;
  }

  bool accept(std::string_view s) {
    if (!peek(s)) return false;
    pos_ += s.size();
    return true;
  }

  bool peek_keyword(std::string_view word) {
    skip_space();
    if (text_.substr(pos_, word.size()) != word) return false;
    const std::size_t end = pos_ + word.size();
    return end == text_.size() || !is_identifier_char(text_[end]);
  }

  Constraint parse_disjunction() {
    std::vector<Constraint> parts{parse_conjunction()};
    while (accept("|")) parts.push_back(parse_conjunction());
    return Constraint::any_of(space_, std::move(parts));
  }

  Constraint parse_conjunction() {
    std::vector<Constraint> parts{parse_unary()};
    while (accept("&")) parts.push_back(parse_unary());
    return Constraint::all_of(space_, std::move(parts));
  }

  Constraint parse_unary() {
    if (accept("!")) return Constraint::negation(parse_unary());
    if (accept("(")) {
      Constraint inner = parse_disjunction();
      if (!accept(")")) fail("expected ')'");
      return inner;
    }
    if (peek_keyword("true")) {
      pos_ += 4;
      return Constraint::truth(space_);
    }
    if (peek_keyword("false")) {
      pos_ += 5;
      return Constraint::falsity(space_);
    }
    return parse_chain();
  }

  std::optional<Comparator> accept_comparator() {
    if (accept("<=")) return Comparator::kLessEq;
    if (accept(">=")) return Comparator::kGreaterEq;
    if (accept("<")) return Comparator::kLess;
    if (accept(">")) return Comparator::kGreater;
    if (accept("=")) return Comparator::kEqual;
    return std::nullopt;
  }

  Constraint parse_chain() {
    skip_space();
    const std::size_t start = pos_;
    std::vector<Monomial> lhs = parse_sum();
    std::vector<Constraint> links;
    while (true) {
      auto cmp = accept_comparator();
      if (!cmp) break;
      std::vector<Monomial> rhs = parse_sum();
      links.push_back(make_comparison(lhs, *cmp, rhs, start));
      lhs = std::move(rhs);
    }
    if (links.empty()) {
      pos_ = start;
      fail("expected a comparison");
    }
    return Constraint::all_of(space_, std::move(links));
  }

  std::vector<Monomial> parse_sum() {
    std::vector<Monomial> terms;
    bool negative = accept("-");
    if (!negative) accept("+");
    while (true) {
      Monomial m = parse_monomial();
      if (negative) m.coefficient = -m.coefficient;
      terms.push_back(std::move(m));
      if (accept("+")) negative = false;
      else if (accept("-")) negative = true;
      else break;
    }
    return terms;
  }

  Monomial parse_monomial() {
    Monomial m;
    do {
      skip_space();
      if (peek("P(") || peek("Pr(")) m.probs.push_back(parse_prob());
      else m.coefficient *= parse_number();
    } while (accept("*"));
    if (m.probs.size() > 2) fail("at most two probabilities may be multiplied");
    return m;
  }

  Rational parse_number() {
    skip_space();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '/' ||
                                   text_[pos_] == '.'))
      ++pos_;
    if (pos_ == start) fail("expected a number or P(...)");
    try {
      return parse_rational(text_.substr(start, pos_ - start));
    } catch (const ParseError& e) {
      throw ParseError(std::string("malformed number '") + std::string(text_.substr(start, pos_ - start)) + "'",
                       start);
    }
  }

  ProbRef parse_prob() {
    const std::size_t at = pos_;
    pos_ += peek("Pr(") ? 3 : 2;
    const std::size_t body = pos_;
    int depth = 0;
    std::optional<std::size_t> bar;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (c == '(') ++depth;
      else if (c == ')') {
        if (depth == 0) break;
        --depth;
      } else if (c == '|' && depth == 0) {
        if (bar) fail("more than one conditioning bar");
        bar = pos_;
      }
      ++pos_;
    }
    if (pos_ >= text_.size()) fail("unterminated P(");
    const std::size_t end = pos_++;
    auto event_at = [&](std::size_t from, std::size_t to) {
      Formula f = parse_formula(text_.substr(from, to - from), from);
      for (const auto& s : f.symbols())
        if (!space_->vocabulary().contains(s)) throw ParseError("unknown symbol '" + s + "'", from);
      return event_of(space_, f);
    };
    if (bar) return ProbRef{event_at(*bar + 1, end) & event_at(body, *bar), event_at(*bar + 1, end), at};
    return ProbRef{event_at(body, end), std::nullopt, at};
  }

  Constraint make_comparison(const std::vector<Monomial>& lhs, Comparator cmp, const std::vector<Monomial>& rhs,
                             std::size_t at) {
    // Move everything to the left: lhs - rhs cmp 0.
    std::vector<Monomial> diff = lhs;
    for (auto m : rhs) {
      m.coefficient = -m.coefficient;
      diff.push_back(std::move(m));
    }
    Rational constant = 0;
    std::vector<const Monomial*> singles, products;
    for (const auto& m : diff) {
      if (m.coefficient == 0) continue;
      if (m.probs.empty()) constant += m.coefficient;
      else if (m.probs.size() == 1) singles.push_back(&m);
      else products.push_back(&m);
    }
    bool conditional = false;
    for (const auto& m : diff)
      for (const auto& p : m.probs) conditional = conditional || p.given.has_value();

    if (!products.empty()) {
      if (cmp != Comparator::kEqual || products.size() != 1 || singles.size() != 1 || constant != 0 || conditional ||
          singles[0]->coefficient != -products[0]->coefficient)
        throw ParseError("a product of probabilities is only allowed as P(A) = P(B) * P(C)", at);
      const auto& pr = products[0]->probs;
      return Constraint::product(space_, ProductAtom{singles[0]->probs[0].event, pr[0].event, pr[1].event});
    }
    if (conditional) {
      if (singles.size() != 1)
        throw ParseError("a conditional probability must be compared against a constant", at);
      const Monomial& m = *singles[0];
      Rational alpha = -constant / m.coefficient;
      Comparator c = m.coefficient > 0 ? cmp : mirror(cmp);
      return conditional_prob(m.probs[0].event, *m.probs[0].given, c, alpha);
    }
    // Prefer positive coefficients: -P(a) <= -1/3 reads back as P(a) >= 1/3.
    const bool flip = !singles.empty() && std::all_of(singles.begin(), singles.end(),
                                                      [](const Monomial* m) { return m->coefficient < 0; });
    LinearAtom atom{{}, flip ? mirror(cmp) : cmp, flip ? constant : Rational(-constant)};
    for (const auto* m : singles)
      atom.terms.push_back(LinearTerm{flip ? Rational(-m->coefficient) : m->coefficient, m->probs[0].event});
    return Constraint::linear(space_, std::move(atom));
  }

  std::string_view text_;
  SpacePtr space_;
  std::size_t pos_ = 0;
};

bool compare(const Rational& lhs, Comparator c, const Rational& rhs) {
  switch (c) {
    case Comparator::kLess: return lhs < rhs;
    case Comparator::kLessEq: return lhs <= rhs;
    case Comparator::kEqual: return lhs == rhs;
    case Comparator::kGreaterEq: return lhs >= rhs;
    case Comparator::kGreater: return lhs > rhs;
  }
  return false;
}

bool compare(double lhs, Comparator c, double rhs, double eps) {
  switch (c) {
    case Comparator::kLess: return lhs < rhs - eps;
    case Comparator::kLessEq: return lhs <= rhs + eps;
    case Comparator::kEqual: return std::abs(lhs - rhs) <= eps;
    case Comparator::kGreaterEq: return lhs >= rhs - eps;
    case Comparator::kGreater: return lhs > rhs + eps;
  }
  return false;
}

template <class Scalar, class Cmp>
bool evaluate(const BasicMeasure<Scalar>& mu, const Constraint& c, const Cmp& cmp) {
  using Kind = Constraint::Kind;
  switch (c.kind()) {
    case Kind::kTrue: return true;
    case Kind::kFalse: return false;
    case Kind::kLinear: {
      const auto& a = c.linear_atom();
      Scalar lhs = 0;
      for (const auto& t : a.terms) {
        if constexpr (BasicMeasure<Scalar>::kExact) lhs += t.coefficient * mu.prob(t.event);
        else lhs += t.coefficient.get_d() * mu.prob(t.event);
      }
      if constexpr (BasicMeasure<Scalar>::kExact) return cmp(lhs, a.comparator, a.bound);
      else return cmp(lhs, a.comparator, a.bound.get_d());
    }
    case Kind::kProduct: {
      const auto& p = c.product_atom();
      return cmp(Scalar(mu.prob(p.lhs)), Comparator::kEqual, Scalar(mu.prob(p.left) * mu.prob(p.right)));
    }
    case Kind::kNot: return !evaluate(mu, c.children()[0], cmp);
    case Kind::kAnd:
      for (const auto& k : c.children())
        if (!evaluate(mu, k, cmp)) return false;
      return true;
    case Kind::kOr:
      for (const auto& k : c.children())
        if (evaluate(mu, k, cmp)) return true;
      return false;
  }
  return false;
}

}  // namespace

Constraint parse_constraint(std::string_view text, const SpacePtr& space) {
  return ConstraintParser(text, space).parse();
}

bool satisfies(const ExactMeasure& mu, const Constraint& c) {
  if (!same_space(mu.space(), c.space())) throw Error("satisfies: measure and constraint on different spaces");
  return evaluate(mu, c, [](const Rational& a, Comparator k, const Rational& b) { return compare(a, k, b); });
}

bool satisfies(const Measure& mu, const Constraint& c, double eps) {
  if (!same_space(mu.space(), c.space())) throw Error("satisfies: measure and constraint on different spaces");
  return evaluate(mu, c, [eps](double a, Comparator k, double b) { return compare(a, k, b, eps); });
}

// DNF --------------------------------------------------------------------------

namespace {

Rational dot(const std::vector<Rational>& a, const std::vector<Rational>& x) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0) s += a[i] * x[i];
  return s;
}

LinearRow negated(const LinearRow& r) {
  LinearRow out{r.coefficients, -r.bound};
  for (auto& c : out.coefficients) c = -c;
  return out;
}

class DnfBuilder {
 public:
  DnfBuilder(SpacePtr space, std::size_t cap) : space_(std::move(space)), cap_(cap) {}

  std::vector<LinearSystem> build(const Constraint& c, bool positive) {
    using Kind = Constraint::Kind;
    switch (c.kind()) {
      case Kind::kTrue: return positive ? std::vector<LinearSystem>{LinearSystem{}} : std::vector<LinearSystem>{};
      case Kind::kFalse: return positive ? std::vector<LinearSystem>{} : std::vector<LinearSystem>{LinearSystem{}};
      case Kind::kProduct: throw Error("product atoms cannot be put in disjunctive normal form");
      case Kind::kLinear: return atom(c.linear_atom(), positive);
      case Kind::kNot: return build(c.children()[0], !positive);
      case Kind::kAnd:
      case Kind::kOr: {
        const bool conjunctive = (c.kind() == Kind::kAnd) == positive;
        if (!conjunctive) {
          std::vector<LinearSystem> out;
          for (const auto& k : c.children()) {
            auto part = build(k, positive);
            out.insert(out.end(), part.begin(), part.end());
            check(out.size());
          }
          return out;
        }
        std::vector<LinearSystem> acc{LinearSystem{}};
        for (const auto& k : c.children()) {
          auto part = build(k, positive);
          check(acc.size() * part.size());
          std::vector<LinearSystem> next;
          for (const auto& a : acc)
            for (const auto& b : part) next.push_back(merge(a, b));
          acc = std::move(next);
          if (acc.empty()) break;
        }
        return acc;
      }
    }
    return {};
  }

 private:
  void check(std::size_t n) const {
    if (n > cap_) throw LimitError("DNF exceeds " + std::to_string(cap_) + " disjuncts");
  }

  static LinearSystem merge(const LinearSystem& a, const LinearSystem& b) {
    LinearSystem s = a;
    s.equalities.insert(s.equalities.end(), b.equalities.begin(), b.equalities.end());
    s.inequalities.insert(s.inequalities.end(), b.inequalities.begin(), b.inequalities.end());
    s.strict.insert(s.strict.end(), b.strict.begin(), b.strict.end());
    return s;
  }

  std::vector<LinearSystem> atom(const LinearAtom& a, bool positive) const {
    LinearRow row{a.coefficients(space_), a.bound};
    Comparator cmp = a.comparator;
    if (!positive) {
      if (cmp == Comparator::kEqual) {
        LinearSystem below, above;
        below.strict.push_back(negated(row));
        above.strict.push_back(row);
        return {below, above};
      }
      cmp = negate(cmp);
    }
    LinearSystem s;
    switch (cmp) {
      case Comparator::kEqual: s.equalities.push_back(row); break;
      case Comparator::kGreaterEq: s.inequalities.push_back(row); break;
      case Comparator::kGreater: s.strict.push_back(row); break;
      case Comparator::kLessEq: s.inequalities.push_back(negated(row)); break;
      case Comparator::kLess: s.strict.push_back(negated(row)); break;
    }
    return {s};
  }

  SpacePtr space_;
  std::size_t cap_;
};

}  // namespace

bool LinearSystem::satisfied_by(const std::vector<Rational>& x) const {
  for (const auto& r : equalities)
    if (dot(r.coefficients, x) != r.bound) return false;
  for (const auto& r : inequalities)
    if (dot(r.coefficients, x) < r.bound) return false;
  for (const auto& r : strict)
    if (dot(r.coefficients, x) <= r.bound) return false;
  return true;
}

DnfForm to_dnf(const Constraint& c, std::size_t max_disjuncts) {
  if (c.has_product_atoms()) throw Error("product atoms cannot be put in disjunctive normal form");
  DnfBuilder builder(c.space(), max_disjuncts);
  return DnfForm{c.space(), builder.build(c, true)};
}

bool satisfies(const ExactMeasure& mu, const DnfForm& dnf) {
  for (const auto& s : dnf.systems)
    if (s.satisfied_by(mu.weights())) return true;
  return false;
}

Constraint translate(const Embedding& f, const Constraint& c) {
  if (!same_space(c.space(), f.source())) throw Error("translate: constraint is not on the embedding's source");
  return c.map_events(f.target(), [&](const Event& e) { return f.apply(e); });
}

}  // namespace repind
