#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace repind {

/// Propositional formula over named symbols.
///
/// Grammar (loosest binding last):
///   primary := ident | 'true' | 'false' | '(' formula ')' | '!' primary
///   and     := primary ('&' primary)*
///   or      := and ('|' and)*
///   implies := or ('=>' implies)?        right associative
///   iff     := implies ('<=>' implies)*
/// Identifiers match [A-Za-z_][A-Za-z0-9_'-]*.
class Formula {
 public:
  enum class Kind { kTrue, kFalse, kSymbol, kNot, kAnd, kOr, kImplies, kIff };

  static Formula truth();
  static Formula falsity();
  static Formula symbol(std::string name);
  static Formula negation(Formula f);
  static Formula conjunction(std::vector<Formula> fs);
  static Formula disjunction(std::vector<Formula> fs);
  static Formula implication(Formula lhs, Formula rhs);
  static Formula biconditional(Formula lhs, Formula rhs);

  Kind kind() const { return node_->kind; }
  const std::string& name() const { return node_->name; }
  const std::vector<Formula>& children() const { return node_->children; }

  /// Evaluates under `value_of`, which maps a symbol name to its truth value.
  bool evaluate(const std::function<bool(const std::string&)>& value_of) const;

  /// Symbol names in order of first occurrence.
  std::vector<std::string> symbols() const;

  /// Fully parenthesised text that parses back to the same tree.
  std::string to_string() const;

 private:
  struct Node {
    Kind kind;
    std::string name;
    std::vector<Formula> children;
  };
  explicit Formula(std::shared_ptr<const Node> node) : node_(std::move(node)) {}

  std::shared_ptr<const Node> node_;
};

/// Parses a whole string as a formula. `offset` is added to positions in
/// reported errors so callers embedding formulas in larger texts can point
/// at the right column.
Formula parse_formula(std::string_view text, std::size_t offset = 0);

/// True if `c` may start or continue an identifier.
bool is_identifier_start(char c);
bool is_identifier_char(char c);

}  // namespace repind
