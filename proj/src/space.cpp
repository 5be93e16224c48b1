#include "repind/space.hpp"

#include <algorithm>
#include <set>

#include "repind/error.hpp"

namespace repind {

Vocabulary::Vocabulary(std::vector<std::string> symbols) : symbols_(std::move(symbols)) {
  if (symbols_.size() > kMaxVocabularySize)
    throw Error("vocabulary has " + std::to_string(symbols_.size()) + " symbols; limit is " +
                std::to_string(kMaxVocabularySize));
  std::set<std::string> seen;
  for (const auto& s : symbols_) {
    if (s.empty()) throw Error("vocabulary symbol names must be non-empty");
    if (!seen.insert(s).second) throw Error("duplicate vocabulary symbol '" + s + "'");
  }
}

std::optional<std::size_t> Vocabulary::index_of(const std::string& name) const {
  auto it = std::find(symbols_.begin(), symbols_.end(), name);
  if (it == symbols_.end()) return std::nullopt;
  return static_cast<std::size_t>(it - symbols_.begin());
}

SpacePtr Space::create(Vocabulary vocabulary, std::vector<WorldBits> worlds, std::vector<Factor> factors,
                       RenameMap renames) {
  if (worlds.empty()) throw Error("empty space");
  std::sort(worlds.begin(), worlds.end());
  if (std::adjacent_find(worlds.begin(), worlds.end()) != worlds.end()) throw Error("duplicate worlds");
  const std::size_t n = vocabulary.size();
  for (WorldBits w : worlds)
    if (n < 64 && (w >> n) != 0) throw Error("world has bits outside the vocabulary");
  auto space = std::shared_ptr<Space>(new Space());
  space->vocabulary_ = std::move(vocabulary);
  space->worlds_ = std::move(worlds);
  space->factors_ = std::move(factors);
  space->renames_ = std::move(renames);
  if (!space->factors_.empty()) {
    space->coordinates_.resize(space->worlds_.size());
    for (std::size_t w = 0; w < space->worlds_.size(); ++w) {
      for (const auto& factor : space->factors_) {
        const std::size_t width = factor.space->vocabulary().size();
        const std::size_t shift = n - factor.offset - width;
        const WorldBits mask = width == 64 ? ~WorldBits{0} : ((WorldBits{1} << width) - 1);
        auto idx = factor.space->index_of((space->worlds_[w] >> shift) & mask);
        if (!idx) throw Error("world does not project into a declared factor");
        space->coordinates_[w].push_back(*idx);
      }
    }
  }
  return space;
}

std::optional<std::size_t> Space::index_of(WorldBits w) const {
  auto it = std::lower_bound(worlds_.begin(), worlds_.end(), w);
  if (it == worlds_.end() || *it != w) return std::nullopt;
  return static_cast<std::size_t>(it - worlds_.begin());
}

bool Space::holds(std::size_t world, std::size_t symbol) const {
  return (worlds_[world] >> (vocabulary_.size() - 1 - symbol)) & 1U;
}

std::size_t Space::from_coordinates(const std::vector<std::size_t>& coords) const {
  if (coords.size() != factors_.size()) throw Error("coordinate count does not match factor count");
  WorldBits bits = 0;
  const std::size_t n = vocabulary_.size();
  for (std::size_t f = 0; f < factors_.size(); ++f) {
    const auto& factor = factors_[f];
    const std::size_t shift = n - factor.offset - factor.space->vocabulary().size();
    bits |= factor.space->world(coords[f]) << shift;
  }
  auto idx = index_of(bits);
  if (!idx) throw Error("coordinates do not name a world");
  return *idx;
}

std::string Space::world_label(std::size_t w) const {
  std::string out = "{";
  bool first = true;
  for (std::size_t s = 0; s < vocabulary_.size(); ++s) {
    if (!holds(w, s)) continue;
    if (!first) out += ",";
    out += vocabulary_[s];
    first = false;
  }
  return out + "}";
}

bool same_space(const SpacePtr& a, const SpacePtr& b) {
  if (a == b) return true;
  if (!a || !b) return false;
  return *a == *b;
}

// Event ----------------------------------------------------------------------

Event::Event(SpacePtr space, Bits members) : space_(std::move(space)), members_(std::move(members)) {
  if (!space_) throw Error("event without a space");
  if (members_.size() != space_->size()) throw Error("event bitset length does not match the space");
}

Event Event::none(SpacePtr space) {
  const auto n = space->size();
  return Event(std::move(space), Bits(n));
}

Event Event::all(SpacePtr space) {
  const auto n = space->size();
  Bits b(n);
  b.set();
  return Event(std::move(space), std::move(b));
}

Event Event::singleton(SpacePtr space, std::size_t world) {
  Bits b(space->size());
  b.set(world);
  return Event(std::move(space), std::move(b));
}

Event Event::of_worlds(SpacePtr space, const std::vector<std::size_t>& worlds) {
  Bits b(space->size());
  for (auto w : worlds) b.set(w);
  return Event(std::move(space), std::move(b));
}

namespace {
void require_same(const Event& a, const Event& b) {
  if (!same_space(a.space(), b.space())) throw Error("events live on different spaces");
}
}  // namespace

bool Event::subset_of(const Event& other) const {
  require_same(*this, other);
  return members_.is_subset_of(other.members_);
}

std::vector<std::size_t> Event::worlds() const {
  std::vector<std::size_t> out;
  for (auto i = members_.find_first(); i != Bits::npos; i = members_.find_next(i)) out.push_back(i);
  return out;
}

Event Event::complement() const { return Event(space_, ~members_); }

Event Event::operator&(const Event& other) const {
  require_same(*this, other);
  return Event(space_, members_ & other.members_);
}

Event Event::operator|(const Event& other) const {
  require_same(*this, other);
  return Event(space_, members_ | other.members_);
}

std::string Event::to_string() const {
  std::string out = "{";
  bool first = true;
  for (auto w : worlds()) {
    if (!first) out += ",";
    out += space_->world_label(w);
    first = false;
  }
  return out + "}";
}

bool operator==(const Event& a, const Event& b) {
  return same_space(a.space_, b.space_) && a.members_ == b.members_;
}

// Construction ---------------------------------------------------------------

namespace {

bool eval_at(const Formula& f, const Vocabulary& vocab, WorldBits w) {
  const std::size_t n = vocab.size();
  return f.evaluate([&](const std::string& name) {
    auto idx = vocab.index_of(name);
    return ((w >> (n - 1 - *idx)) & 1U) != 0;
  });
}

void check_symbols(const Formula& f, const Vocabulary& vocab) {
  for (const auto& s : f.symbols())
    if (!vocab.contains(s)) throw ParseError("unknown symbol '" + s + "'", 0);
}

}  // namespace

SpacePtr enumerate_worlds(const Vocabulary& vocabulary, const std::optional<Formula>& restriction) {
  const std::size_t n = vocabulary.size();
  if (n > 24) throw LimitError("refusing to enumerate 2^" + std::to_string(n) + " assignments");
  if (restriction) check_symbols(*restriction, vocabulary);
  std::vector<WorldBits> worlds;
  for (WorldBits w = 0; w < (WorldBits{1} << n); ++w)
    if (!restriction || eval_at(*restriction, vocabulary, w)) worlds.push_back(w);
  if (worlds.empty()) throw Error("empty space");
  return Space::create(vocabulary, std::move(worlds));
}

SpacePtr enumerate_worlds(const std::vector<std::string>& symbols, const std::string& restriction) {
  if (restriction.find_first_not_of(" \t\n") == std::string::npos) return enumerate_worlds(Vocabulary(symbols));
  return enumerate_worlds(Vocabulary(symbols), parse_formula(restriction));
}

Event event_of(const SpacePtr& space, const Formula& formula) {
  check_symbols(formula, space->vocabulary());
  Event::Bits bits(space->size());
  for (std::size_t w = 0; w < space->size(); ++w)
    if (eval_at(formula, space->vocabulary(), space->world(w))) bits.set(w);
  return Event(space, std::move(bits));
}

Event event_of(const SpacePtr& space, const std::string& formula) {
  return event_of(space, parse_formula(formula));
}

SpacePtr product_space(const std::vector<SpacePtr>& spaces) {
  if (spaces.empty()) throw Error("product of no spaces");
  std::vector<std::string> symbols;
  std::set<std::string> used;
  Space::RenameMap renames;
  std::vector<Factor> factors;
  for (std::size_t i = 0; i < spaces.size(); ++i) {
    factors.push_back(Factor{spaces[i], symbols.size()});
    for (const auto& s : spaces[i]->vocabulary().symbols()) {
      std::string name = s;
      while (used.count(name)) name += "'";
      if (name != s) renames[{i, s}] = name;
      used.insert(name);
      symbols.push_back(name);
    }
  }
  if (symbols.size() > kMaxVocabularySize) throw LimitError("product vocabulary too large");
  std::vector<WorldBits> worlds{0};
  for (const auto& sp : spaces) {
    const std::size_t width = sp->vocabulary().size();
    std::vector<WorldBits> next;
    next.reserve(worlds.size() * sp->size());
    for (WorldBits prefix : worlds)
      for (WorldBits w : sp->worlds()) next.push_back((prefix << width) | w);
    worlds = std::move(next);
  }
  // Factors keep their original vocabularies; the renamed names only live on
  // the product itself.
  return Space::create(Vocabulary(symbols), std::move(worlds), std::move(factors), std::move(renames));
}

// Decomposition ----------------------------------------------------------------

namespace {

WorldBits project(WorldBits w, const std::vector<std::size_t>& symbols, std::size_t n) {
  WorldBits out = 0;
  for (auto s : symbols) out = (out << 1) | ((w >> (n - 1 - s)) & 1U);
  return out;
}

std::size_t distinct_projections(const std::vector<WorldBits>& worlds, const std::vector<std::size_t>& symbols,
                                 std::size_t n) {
  std::set<WorldBits> seen;
  for (auto w : worlds) seen.insert(project(w, symbols, n));
  return seen.size();
}

}  // namespace

Decomposition decompose(const SpacePtr& space) {
  const std::size_t n = space->vocabulary().size();
  const auto& worlds = space->worlds();

  std::vector<std::size_t> varying, constant;
  for (std::size_t s = 0; s < n; ++s) {
    bool first = space->holds(0, s);
    bool differs = false;
    for (std::size_t w = 1; w < worlds.size() && !differs; ++w) differs = space->holds(w, s) != first;
    (differs ? varying : constant).push_back(s);
  }

  std::vector<std::vector<std::size_t>> blocks;
  std::vector<std::size_t> rest = varying;
  while (!rest.empty()) {
    const std::size_t total = distinct_projections(worlds, rest, n);
    const std::size_t others = rest.size() - 1;
    if (others > 24) throw LimitError("vocabulary too large to decompose");
    std::vector<std::size_t> chosen = rest;
    // Smallest block containing rest[0] that splits off as a product factor.
    bool found = false;
    for (std::size_t size = 0; size < others && !found; ++size) {
      std::vector<bool> pick(others, false);
      std::fill(pick.begin(), pick.begin() + static_cast<long>(size), true);
      do {
        std::vector<std::size_t> block{rest[0]}, complement;
        for (std::size_t k = 0; k < others; ++k) (pick[k] ? block : complement).push_back(rest[k + 1]);
        std::sort(block.begin(), block.end());
        if (distinct_projections(worlds, block, n) * distinct_projections(worlds, complement, n) == total) {
          chosen = block;
          found = true;
          break;
        }
      } while (std::prev_permutation(pick.begin(), pick.end()));
    }
    blocks.push_back(chosen);
    std::vector<std::size_t> remaining;
    for (auto s : rest)
      if (std::find(chosen.begin(), chosen.end(), s) == chosen.end()) remaining.push_back(s);
    rest = std::move(remaining);
  }
  if (blocks.empty()) blocks.push_back({});
  for (auto s : constant) blocks.front().push_back(s);
  for (auto& b : blocks) std::sort(b.begin(), b.end());

  Decomposition out;
  out.symbols = blocks;
  if (blocks.size() == 1) {
    out.factors.push_back(space);
    out.coordinates.resize(worlds.size());
    for (std::size_t w = 0; w < worlds.size(); ++w) out.coordinates[w] = {w};
    return out;
  }
  for (const auto& block : blocks) {
    std::vector<std::string> names;
    for (auto s : block) names.push_back(space->vocabulary()[s]);
    std::set<WorldBits> projected;
    for (auto w : worlds) projected.insert(project(w, block, n));
    out.factors.push_back(Space::create(Vocabulary(names), {projected.begin(), projected.end()}));
  }
  out.coordinates.resize(worlds.size());
  for (std::size_t w = 0; w < worlds.size(); ++w)
    for (std::size_t i = 0; i < blocks.size(); ++i)
      out.coordinates[w].push_back(*out.factors[i]->index_of(project(worlds[w], blocks[i], n)));
  return out;
}

std::vector<SpacePtr> product_decomposition(const SpacePtr& space) { return decompose(space).factors; }

std::vector<Event> atoms_over(const SpacePtr& space, const std::vector<Event>& events) {
  for (const auto& e : events)
    if (!same_space(e.space(), space)) throw Error("atoms_over: event on a different space");
  // Group worlds by their membership signature; each group is one atom.
  std::map<std::vector<bool>, std::vector<std::size_t>> groups;
  for (std::size_t w = 0; w < space->size(); ++w) {
    std::vector<bool> signature;
    signature.reserve(events.size());
    for (const auto& e : events) signature.push_back(!e.contains(w));
    groups[signature].push_back(w);
  }
  std::vector<Event> atoms;
  for (const auto& [sig, ws] : groups) atoms.push_back(Event::of_worlds(space, ws));
  return atoms;
}

}  // namespace repind
