#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "repind/formula.hpp"
#include "repind/space.hpp"

namespace repind {

/// A Boolean-algebra homomorphism f from the events of `source` (X) to the
/// events of `target` (Y). In the finite case it is fixed by the images of
/// the singletons, which are pairwise disjoint and cover Y.
///
/// Surjection-backed embeddings come from a world map g: Y -> X with
/// f(S) = g^-1(S); they are always faithful. Event-table embeddings come
/// from interpretations and may send some world to the empty event, in
/// which case they are not faithful. For this finite, all-measurable
/// setting, "S subset of T iff f(S) subset of f(T)" reduces to every
/// singleton image being nonempty, which is what is_faithful checks.
class Embedding {
 public:
  enum class Backing { kSurjection, kEventTable };

  /// g[y] is the X-world that Y-world y maps to. Throws if g is not onto.
  static Embedding from_surjection(SpacePtr source, SpacePtr target, std::vector<std::size_t> g);
  /// images[x] = f({x}). Throws unless the images are disjoint and cover Y.
  static Embedding from_images(SpacePtr source, SpacePtr target, std::vector<Event> images);
  static Embedding identity(SpacePtr space);

  const SpacePtr& source() const { return source_; }
  const SpacePtr& target() const { return target_; }
  Backing backing() const { return backing_; }

  /// f(S) for an event on the source space.
  Event apply(const Event& s) const;
  const Event& image(std::size_t x) const { return images_[x]; }
  /// The X-world whose image contains Y-world y, if any.
  std::optional<std::size_t> world_map(std::size_t y) const { return world_map_[y]; }

  bool is_faithful() const;

 private:
  Embedding(SpacePtr source, SpacePtr target, Backing backing, std::vector<Event> images);

  SpacePtr source_;
  SpacePtr target_;
  Backing backing_;
  std::vector<Event> images_;
  std::vector<std::optional<std::size_t>> world_map_;
};

inline bool is_faithful(const Embedding& f) { return f.is_faithful(); }

/// X -> Z embedding S |-> outer(inner(S)) for inner: X -> Y, outer: Y -> Z.
Embedding compose(const Embedding& inner, const Embedding& outer);

/// Maps each source symbol to a formula over the target vocabulary.
using Interpretation = std::map<std::string, Formula>;

/// The embedding sending [[phi]]_src to [[i(phi)]]_dst. Throws if a source
/// symbol is unmapped or some target world's induced assignment is not a
/// world of `src` (then no homomorphism exists).
Embedding from_interpretation(const Interpretation& i, const SpacePtr& src, const SpacePtr& dst);

/// f(<x1..xn>) = f1(x1) x ... x fn(xn) between product_space of the part
/// sources and product_space of the part targets.
Embedding product_embedding(const std::vector<Embedding>& parts);

/// Coordinate permutation of a declared product: g(<y1..yn>) = <y_pi(1)..y_pi(n)>.
/// Factors moved onto each other must be identical spaces.
Embedding permutation_embedding(const SpacePtr& space, const std::vector<std::size_t>& pi);

/// Embeds declared factor `factor` of `product` as cylinder events.
Embedding cylinder_embedding(const SpacePtr& product, std::size_t factor);

/// A seeded, uniformly random surjection Y -> X. Requires |Y| >= |X|.
Embedding random_faithful_embedding(const SpacePtr& x, const SpacePtr& y, std::uint64_t seed);

}  // namespace repind
