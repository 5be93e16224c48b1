#pragma once

#include <cstddef>
#include <memory>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "repind/embedding.hpp"
#include "repind/measure.hpp"
#include "repind/rational.hpp"
#include "repind/space.hpp"

namespace repind {

enum class Comparator { kLess, kLessEq, kEqual, kGreaterEq, kGreater };

std::string to_string(Comparator c);
/// The comparator of the negated comparison (= has no single negation).
Comparator negate(Comparator c);
/// a < b  <=>  b > a.
Comparator mirror(Comparator c);

struct LinearTerm {
  Rational coefficient;
  Event event;
};

/// sum_i c_i Pr(S_i)  cmp  bound.
struct LinearAtom {
  std::vector<LinearTerm> terms;
  Comparator comparator;
  Rational bound;

  /// Per-world coefficient a(x) = sum of c_i over the S_i containing x.
  std::vector<Rational> coefficients(const SpacePtr& space) const;
};

/// Pr(lhs) = Pr(left) * Pr(right). Only evaluated pointwise; never part of
/// a DNF or an LP.
struct ProductAtom {
  Event lhs;
  Event left;
  Event right;
};

/// Boolean combination of probability comparisons on Delta_X for one space X.
class Constraint {
 public:
  enum class Kind { kTrue, kFalse, kLinear, kProduct, kNot, kAnd, kOr };

  static Constraint truth(SpacePtr space);
  static Constraint falsity(SpacePtr space);
  static Constraint linear(SpacePtr space, LinearAtom atom);
  static Constraint product(SpacePtr space, ProductAtom atom);
  static Constraint negation(const Constraint& c);
  static Constraint all_of(SpacePtr space, std::vector<Constraint> cs);
  static Constraint any_of(SpacePtr space, std::vector<Constraint> cs);

  const SpacePtr& space() const { return node_->space; }
  Kind kind() const { return node_->kind; }
  const LinearAtom& linear_atom() const { return std::get<LinearAtom>(node_->atom); }
  const ProductAtom& product_atom() const { return std::get<ProductAtom>(node_->atom); }
  const std::vector<Constraint>& children() const { return node_->children; }

  bool has_product_atoms() const;
  /// Every event mentioned, in order of appearance.
  std::vector<Event> events() const;

  /// Rebuilds the tree with each event replaced by `map(event)` on `space`.
  template <class F>
  Constraint map_events(SpacePtr space, F&& map) const;

  std::string to_string() const;

  Constraint operator&&(const Constraint& other) const { return all_of(space(), {*this, other}); }
  Constraint operator||(const Constraint& other) const { return any_of(space(), {*this, other}); }
  Constraint operator!() const { return negation(*this); }

 private:
  struct Node {
    Kind kind;
    SpacePtr space;
    std::variant<std::monostate, LinearAtom, ProductAtom> atom;
    std::vector<Constraint> children;
  };
  explicit Constraint(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Pr(s) cmp bound.
Constraint prob(const Event& s, Comparator cmp, const Rational& bound);
/// Pr(s | given) cmp bound, cleared of the denominator:
/// Pr(s & given) - bound * Pr(given) cmp 0.
Constraint conditional_prob(const Event& s, const Event& given, Comparator cmp, const Rational& bound);

/// Parses the constraint DSL:
///   constraint := disj
///   disj       := conj ('|' conj)*
///   conj       := unary ('&' unary)*
///   unary      := '!' unary | '(' constraint ')' | 'true' | 'false' | chain
///   chain      := sum cmp sum (cmp sum)*           e.g. 0 < P(p) < 1
///   sum        := ['-'] term (('+'|'-') term)*
///   term       := rational ['*' prob] | prob ['*' rational] | prob '*' prob
///   prob       := 'P(' formula ['|' formula] ')'
/// A top-level '|' inside P(...) separates the condition; disjunctions
/// inside a probability must be parenthesised: P((a | b)). A conditional
/// probability must be the only probability term of its comparison. A
/// product term is allowed only as P(A) = P(B) * P(C).
Constraint parse_constraint(std::string_view text, const SpacePtr& space);

/// Exact evaluation.
bool satisfies(const ExactMeasure& mu, const Constraint& c);
/// Float evaluation: equalities hold within eps, non-strict comparisons get
/// eps slack, strict comparisons need an eps margin.
bool satisfies(const Measure& mu, const Constraint& c, double eps = 1e-9);

/// a . x  (=, >=, >)  bound, with a given per world.
struct LinearRow {
  std::vector<Rational> coefficients;
  Rational bound;
};

/// One conjunctive system; its denotation is a convex cell of the simplex.
struct LinearSystem {
  std::vector<LinearRow> equalities;
  std::vector<LinearRow> inequalities;  // a.x >= b
  std::vector<LinearRow> strict;        // a.x > b

  bool satisfied_by(const std::vector<Rational>& x) const;
};

/// Disjunction of conjunctive systems over one space.
struct DnfForm {
  SpacePtr space;
  std::vector<LinearSystem> systems;
};

inline constexpr std::size_t kDefaultMaxDisjuncts = 4096;

/// Pushes negations to the atoms and distributes. Throws LimitError when
/// more than `max_disjuncts` systems would be produced, Error on product atoms.
DnfForm to_dnf(const Constraint& c, std::size_t max_disjuncts = kDefaultMaxDisjuncts);

bool satisfies(const ExactMeasure& mu, const DnfForm& dnf);

/// f*(c): each event S becomes f(S).
Constraint translate(const Embedding& f, const Constraint& c);

// ---------------------------------------------------------------------------

template <class F>
Constraint Constraint::map_events(SpacePtr target, F&& map) const {
  switch (kind()) {
    case Kind::kTrue: return truth(target);
    case Kind::kFalse: return falsity(target);
    case Kind::kLinear: {
      LinearAtom a = linear_atom();
      for (auto& t : a.terms) t.event = map(t.event);
      return linear(target, std::move(a));
    }
    case Kind::kProduct: {
      const auto& p = product_atom();
      return product(target, ProductAtom{map(p.lhs), map(p.left), map(p.right)});
    }
    case Kind::kNot: return negation(children()[0].map_events(target, map));
    case Kind::kAnd:
    case Kind::kOr: {
      std::vector<Constraint> kids;
      for (const auto& c : children()) kids.push_back(c.map_events(target, map));
      return kind() == Kind::kAnd ? all_of(target, std::move(kids)) : any_of(target, std::move(kids));
    }
  }
  return truth(target);
}

}  // namespace repind
