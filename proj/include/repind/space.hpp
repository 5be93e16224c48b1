#pragma once

#include <boost/dynamic_bitset.hpp>

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "repind/formula.hpp"

namespace repind {

/// Ordered list of distinct, non-empty proposition names. The order fixes
/// the bit layout of every world over this vocabulary.
class Vocabulary {
 public:
  Vocabulary() = default;
  explicit Vocabulary(std::vector<std::string> symbols);

  std::size_t size() const { return symbols_.size(); }
  const std::string& operator[](std::size_t i) const { return symbols_[i]; }
  const std::vector<std::string>& symbols() const { return symbols_; }
  std::optional<std::size_t> index_of(const std::string& name) const;
  bool contains(const std::string& name) const { return index_of(name).has_value(); }

  friend bool operator==(const Vocabulary&, const Vocabulary&) = default;

 private:
  std::vector<std::string> symbols_;
};

/// A truth assignment packed into an integer. Symbol `i` of an `n`-symbol
/// vocabulary lives at bit `n - 1 - i`, so numeric order is lexicographic
/// order with the first symbol most significant.
using WorldBits = std::uint64_t;

inline constexpr std::size_t kMaxVocabularySize = 40;

class Space;
using SpacePtr = std::shared_ptr<const Space>;

/// One declared factor of a product space: the factor space and the
/// vocabulary position at which its symbols start.
struct Factor {
  SpacePtr space;
  std::size_t offset;
};

/// A finite set of worlds over a vocabulary; every subset is an event.
class Space {
 public:
  /// Worlds must be distinct; they are stored sorted.
  using RenameMap = std::map<std::pair<std::size_t, std::string>, std::string>;

  static SpacePtr create(Vocabulary vocabulary, std::vector<WorldBits> worlds,
                         std::vector<Factor> factors = {}, RenameMap renames = {});

  const Vocabulary& vocabulary() const { return vocabulary_; }
  std::size_t size() const { return worlds_.size(); }
  WorldBits world(std::size_t i) const { return worlds_[i]; }
  const std::vector<WorldBits>& worlds() const { return worlds_; }
  std::optional<std::size_t> index_of(WorldBits w) const;

  bool holds(std::size_t world, std::size_t symbol) const;

  /// Declared product structure (empty unless built by product_space).
  const std::vector<Factor>& factors() const { return factors_; }
  bool is_product() const { return !factors_.empty(); }
  /// Index of world `w` inside declared factor `f`.
  std::size_t factor_coordinate(std::size_t w, std::size_t f) const { return coordinates_[w][f]; }
  /// World index with the given per-factor coordinates.
  std::size_t from_coordinates(const std::vector<std::size_t>& coords) const;

  /// Renames applied to avoid symbol collisions when this product was built;
  /// maps (factor index, original name) to the name used here.
  const RenameMap& renames() const { return renames_; }

  /// `{fly,bird}` style list of the true symbols.
  std::string world_label(std::size_t w) const;

  friend bool operator==(const Space& a, const Space& b) {
    return a.vocabulary_ == b.vocabulary_ && a.worlds_ == b.worlds_;
  }

 private:
  Space() = default;

  Vocabulary vocabulary_;
  std::vector<WorldBits> worlds_;
  std::vector<Factor> factors_;
  std::vector<std::vector<std::size_t>> coordinates_;
  RenameMap renames_;
};

/// True if both pointers denote the same space (identical or structurally equal).
bool same_space(const SpacePtr& a, const SpacePtr& b);

/// A subset of a space's worlds.
class Event {
 public:
  using Bits = boost::dynamic_bitset<>;

  Event(SpacePtr space, Bits members);
  static Event none(SpacePtr space);
  static Event all(SpacePtr space);
  static Event singleton(SpacePtr space, std::size_t world);
  static Event of_worlds(SpacePtr space, const std::vector<std::size_t>& worlds);

  const SpacePtr& space() const { return space_; }
  const Bits& members() const { return members_; }
  bool contains(std::size_t world) const { return members_.test(world); }
  std::size_t count() const { return members_.count(); }
  bool empty() const { return members_.none(); }
  bool is_all() const { return members_.all(); }
  bool subset_of(const Event& other) const;
  std::vector<std::size_t> worlds() const;

  Event complement() const;
  Event operator&(const Event& other) const;
  Event operator|(const Event& other) const;
  Event operator~() const { return complement(); }

  /// `{w1,w2}` using world labels.
  std::string to_string() const;

  friend bool operator==(const Event& a, const Event& b);
  friend bool operator<(const Event& a, const Event& b) { return a.members_ < b.members_; }

 private:
  SpacePtr space_;
  Bits members_;
};

/// All assignments over `vocabulary` that satisfy `restriction` (all of them
/// if absent), in lexicographic order. Throws Error("empty space") when no
/// assignment survives, ParseError on unknown symbols. A blank restriction
/// string means no restriction.
SpacePtr enumerate_worlds(const Vocabulary& vocabulary,
                          const std::optional<Formula>& restriction = std::nullopt);
SpacePtr enumerate_worlds(const std::vector<std::string>& symbols,
                          const std::string& restriction);

/// The worlds satisfying `formula`.
Event event_of(const SpacePtr& space, const Formula& formula);
Event event_of(const SpacePtr& space, const std::string& formula);

/// Cartesian product. Colliding symbol names get a `'` suffix (repeated
/// until unique); renames are recorded on the result.
SpacePtr product_space(const std::vector<SpacePtr>& spaces);

/// The finest factorisation of a space along a partition of its vocabulary.
struct Decomposition {
  std::vector<SpacePtr> factors;
  /// Vocabulary positions (in the decomposed space) of each factor's symbols.
  std::vector<std::vector<std::size_t>> symbols;
  /// coordinates[w][i] = index of world w's projection inside factors[i].
  std::vector<std::vector<std::size_t>> coordinates;
};

/// Unique maximal decomposition. Symbols that are constant across the space
/// are attached to the first factor, so no factor has a single world unless
/// the space itself does.
Decomposition decompose(const SpacePtr& space);
std::vector<SpacePtr> product_decomposition(const SpacePtr& space);

/// Nonempty signed intersections of `events` (all on one space). They
/// partition the space; duplicate inputs collapse.
std::vector<Event> atoms_over(const SpacePtr& space, const std::vector<Event>& events);

}  // namespace repind
