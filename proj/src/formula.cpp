#include "repind/formula.hpp"

#include <algorithm>
#include <cctype>

#include "repind/error.hpp"

namespace repind {

bool is_identifier_start(char c) {
  return std::isalpha(static_cast<unsigned char>(c)) || c == '_';
}

bool is_identifier_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '\'' || c == '-';
}

Formula Formula::truth() { return Formula(std::make_shared<const Node>(Node{Kind::kTrue, {}, {}})); }
Formula Formula::falsity() { return Formula(std::make_shared<const Node>(Node{Kind::kFalse, {}, {}})); }
Formula Formula::symbol(std::string name) {
  return Formula(std::make_shared<const Node>(Node{Kind::kSymbol, std::move(name), {}}));
}
Formula Formula::negation(Formula f) {
  return Formula(std::make_shared<const Node>(Node{Kind::kNot, {}, {std::move(f)}}));
}
Formula Formula::conjunction(std::vector<Formula> fs) {
  if (fs.empty()) return truth();
  if (fs.size() == 1) return fs.front();
  return Formula(std::make_shared<const Node>(Node{Kind::kAnd, {}, std::move(fs)}));
}
Formula Formula::disjunction(std::vector<Formula> fs) {
  if (fs.empty()) return falsity();
  if (fs.size() == 1) return fs.front();
  return Formula(std::make_shared<const Node>(Node{Kind::kOr, {}, std::move(fs)}));
}
Formula Formula::implication(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{Kind::kImplies, {}, {std::move(lhs), std::move(rhs)}}));
}
Formula Formula::biconditional(Formula lhs, Formula rhs) {
  return Formula(std::make_shared<const Node>(Node{Kind::kIff, {}, {std::move(lhs), std::move(rhs)}}));
}

bool Formula::evaluate(const std::function<bool(const std::string&)>& value_of) const {
  const auto& kids = children();
  switch (kind()) {
    case Kind::kTrue: return true;
    case Kind::kFalse: return false;
    case Kind::kSymbol: return value_of(name());
    case Kind::kNot: return !kids[0].evaluate(value_of);
    case Kind::kAnd:
      return std::all_of(kids.begin(), kids.end(), [&](const Formula& f) { return f.evaluate(value_of); });
    case Kind::kOr:
      return std::any_of(kids.begin(), kids.end(), [&](const Formula& f) { return f.evaluate(value_of); });
    case Kind::kImplies: return !kids[0].evaluate(value_of) || kids[1].evaluate(value_of);
    case Kind::kIff: return kids[0].evaluate(value_of) == kids[1].evaluate(value_of);
  }
  return false;
}

std::vector<std::string> Formula::symbols() const {
  std::vector<std::string> out;
  std::function<void(const Formula&)> walk = [&](const Formula& f) {
    if (f.kind() == Kind::kSymbol) {
      if (std::find(out.begin(), out.end(), f.name()) == out.end()) out.push_back(f.name());
      return;
    }
    for (const auto& c : f.children()) walk(c);
  };
  walk(*this);
  return out;
}

std::string Formula::to_string() const {
  const auto& kids = children();
  auto join = [&](const char* op) {
    std::string s = "(";
    for (std::size_t i = 0; i < kids.size(); ++i) {
      if (i) s += op;
      s += kids[i].to_string();
    }
    return s + ")";
  };
  switch (kind()) {
    case Kind::kTrue: return "true";
    case Kind::kFalse: return "false";
    case Kind::kSymbol: return name();
    case Kind::kNot: return "!" + kids[0].to_string();
    case Kind::kAnd: return join(" & ");
    case Kind::kOr: return join(" | ");
    case Kind::kImplies: return join(" => ");
    case Kind::kIff: return join(" <=> ");
  }
  return {};
}

namespace {

class FormulaParser {
 public:
  FormulaParser(std::string_view text, std::size_t offset) : text_(text), offset_(offset) {}

  Formula parse() {
    Formula f = parse_iff();
    skip_space();
    if (pos_ != text_.size()) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    return f;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, offset_ + pos_); }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
  }

  bool accept(std::string_view op) {
    skip_space();
    if (text_.substr(pos_, op.size()) == op) {
      pos_ += op.size();
      return true;
    }
    return false;
  }

  Formula parse_iff() {
    Formula lhs = parse_implies();
    while (accept("<=>")) lhs = Formula::biconditional(lhs, parse_implies());
    return lhs;
  }

  Formula parse_implies() {
    Formula lhs = parse_or();
    if (accept("=>")) return Formula::implication(lhs, parse_implies());
    return lhs;
  }

  Formula parse_or() {
    std::vector<Formula> parts{parse_and()};
    while (accept("|")) parts.push_back(parse_and());
    return Formula::disjunction(std::move(parts));
  }

  Formula parse_and() {
    std::vector<Formula> parts{parse_unary()};
    while (accept("&")) parts.push_back(parse_unary());
    return Formula::conjunction(std::move(parts));
  }

  Formula parse_unary() {
    if (accept("!")) return Formula::negation(parse_unary());
    if (accept("(")) {
      Formula inner = parse_iff();
      if (!accept(")")) fail("expected ')'");
      return inner;
    }
    skip_space();
    if (pos_ >= text_.size()) fail("unexpected end of formula");
    if (!is_identifier_start(text_[pos_])) fail("unexpected '" + std::string(1, text_[pos_]) + "'");
    std::size_t start = pos_;
    while (pos_ < text_.size() && is_identifier_char(text_[pos_])) ++pos_;
    // A trailing '-' belongs to no identifier; give it back.
    while (pos_ > start + 1 && text_[pos_ - 1] == '-') --pos_;
    std::string name(text_.substr(start, pos_ - start));
    if (name == "true") return Formula::truth();
    if (name == "false") return Formula::falsity();
    return Formula::symbol(std::move(name));
  }

  std::string_view text_;
  std::size_t offset_;
  std::size_t pos_ = 0;
};

}  // namespace

Formula parse_formula(std::string_view text, std::size_t offset) {
  return FormulaParser(text, offset).parse();
}

}  // namespace repind
