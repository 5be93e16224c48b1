#include "repind/embedding.hpp"

#include <algorithm>
#include <random>

#include "repind/error.hpp"

namespace repind {

Embedding::Embedding(SpacePtr source, SpacePtr target, Backing backing, std::vector<Event> images)
    : source_(std::move(source)), target_(std::move(target)), backing_(backing), images_(std::move(images)) {
  if (images_.size() != source_->size()) throw Error("embedding needs one image per source world");
  Event::Bits covered(target_->size());
  world_map_.assign(target_->size(), std::nullopt);
  for (std::size_t x = 0; x < images_.size(); ++x) {
    if (!same_space(images_[x].space(), target_)) throw Error("embedding image on the wrong space");
    if ((covered & images_[x].members()).any())
      throw Error("not a homomorphism: images of distinct worlds overlap");
    covered |= images_[x].members();
    for (auto y : images_[x].worlds()) world_map_[y] = x;
  }
  if (!covered.all()) throw Error("not a homomorphism: f(X) is not all of Y");
}

Embedding Embedding::from_surjection(SpacePtr source, SpacePtr target, std::vector<std::size_t> g) {
  if (g.size() != target->size()) throw Error("surjection must map every target world");
  std::vector<Event::Bits> bits(source->size(), Event::Bits(target->size()));
  for (std::size_t y = 0; y < g.size(); ++y) {
    if (g[y] >= source->size()) throw Error("surjection maps outside the source space");
    bits[g[y]].set(y);
  }
  std::vector<Event> images;
  for (std::size_t x = 0; x < bits.size(); ++x) {
    if (bits[x].none())
      throw Error("map is not surjective: source world " + source->world_label(x) + " has no preimage");
    images.emplace_back(target, std::move(bits[x]));
  }
  return Embedding(std::move(source), std::move(target), Backing::kSurjection, std::move(images));
}

Embedding Embedding::from_images(SpacePtr source, SpacePtr target, std::vector<Event> images) {
  return Embedding(std::move(source), std::move(target), Backing::kEventTable, std::move(images));
}

Embedding Embedding::identity(SpacePtr space) {
  std::vector<std::size_t> g(space->size());
  for (std::size_t i = 0; i < g.size(); ++i) g[i] = i;
  return from_surjection(space, space, std::move(g));
}

Event Embedding::apply(const Event& s) const {
  if (!same_space(s.space(), source_)) throw Error("embedding applied to an event on another space");
  Event::Bits out(target_->size());
  for (auto x : s.worlds()) out |= images_[x].members();
  return Event(target_, std::move(out));
}

bool Embedding::is_faithful() const {
  if (backing_ == Backing::kSurjection) return true;
  for (const auto& img : images_)
    if (img.empty()) return false;
  return true;
}

Embedding compose(const Embedding& inner, const Embedding& outer) {
  if (!same_space(inner.target(), outer.source())) throw Error("compose: spaces do not line up");
  std::vector<Event> images;
  for (std::size_t x = 0; x < inner.source()->size(); ++x) images.push_back(outer.apply(inner.image(x)));
  const bool surj = inner.backing() == Embedding::Backing::kSurjection &&
                    outer.backing() == Embedding::Backing::kSurjection;
  if (surj) {
    std::vector<std::size_t> g(outer.target()->size());
    for (std::size_t z = 0; z < g.size(); ++z) g[z] = *inner.world_map(*outer.world_map(z));
    return Embedding::from_surjection(inner.source(), outer.target(), std::move(g));
  }
  return Embedding::from_images(inner.source(), outer.target(), std::move(images));
}

Embedding from_interpretation(const Interpretation& i, const SpacePtr& src, const SpacePtr& dst) {
  const auto& vocab = src->vocabulary();
  std::vector<Event> symbol_events;
  for (const auto& name : vocab.symbols()) {
    auto it = i.find(name);
    if (it == i.end()) throw Error("interpretation does not map symbol '" + name + "'");
    symbol_events.push_back(event_of(dst, it->second));
  }
  // Each target world induces an assignment to the source vocabulary; the
  // image of a source world is the set of target worlds inducing it.
  std::vector<Event::Bits> bits(src->size(), Event::Bits(dst->size()));
  for (std::size_t y = 0; y < dst->size(); ++y) {
    WorldBits assignment = 0;
    for (std::size_t s = 0; s < vocab.size(); ++s)
      assignment = (assignment << 1) | (symbol_events[s].contains(y) ? 1U : 0U);
    auto x = src->index_of(assignment);
    if (!x)
      throw Error("interpretation does not respect the source space: target world " + dst->world_label(y) +
                  " induces an assignment outside it");
    bits[*x].set(y);
  }
  std::vector<Event> images;
  for (auto& b : bits) images.emplace_back(dst, std::move(b));
  return Embedding::from_images(src, dst, std::move(images));
}

Embedding product_embedding(const std::vector<Embedding>& parts) {
  if (parts.empty()) throw Error("product embedding of no parts");
  std::vector<SpacePtr> sources, targets;
  for (const auto& p : parts) {
    sources.push_back(p.source());
    targets.push_back(p.target());
  }
  auto x = product_space(sources);
  auto y = product_space(targets);
  std::vector<std::size_t> coords(parts.size());
  bool all_faithful = true;
  for (const auto& p : parts) all_faithful = all_faithful && p.backing() == Embedding::Backing::kSurjection;
  if (all_faithful) {
    std::vector<std::size_t> g(y->size());
    for (std::size_t w = 0; w < y->size(); ++w) {
      for (std::size_t i = 0; i < parts.size(); ++i) coords[i] = *parts[i].world_map(y->factor_coordinate(w, i));
      g[w] = x->from_coordinates(coords);
    }
    return Embedding::from_surjection(x, y, std::move(g));
  }
  std::vector<Event::Bits> bits(x->size(), Event::Bits(y->size()));
  for (std::size_t w = 0; w < y->size(); ++w) {
    bool mapped = true;
    for (std::size_t i = 0; i < parts.size() && mapped; ++i) {
      auto xi = parts[i].world_map(y->factor_coordinate(w, i));
      if (!xi) mapped = false;
      else coords[i] = *xi;
    }
    if (mapped) bits[x->from_coordinates(coords)].set(w);
  }
  std::vector<Event> images;
  for (auto& b : bits) images.emplace_back(y, std::move(b));
  return Embedding::from_images(x, y, std::move(images));
}

Embedding permutation_embedding(const SpacePtr& space, const std::vector<std::size_t>& pi) {
  const auto& factors = space->factors();
  const std::size_t n = factors.size();
  if (n == 0) throw Error("permutation embedding needs a declared product space");
  if (pi.size() != n) throw Error("permutation size does not match the factor count");
  std::vector<bool> seen(n, false);
  for (auto p : pi) {
    if (p >= n || seen[p]) throw Error("not a permutation");
    seen[p] = true;
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto& a = factors[i].space;
    const auto& b = factors[pi[i]].space;
    if (a->worlds() != b->worlds() || a->vocabulary().size() != b->vocabulary().size())
      throw Error("permutation moves factor " + std::to_string(pi[i]) + " onto non-isomorphic factor " +
                  std::to_string(i));
  }
  std::vector<std::size_t> g(space->size()), coords(n);
  for (std::size_t y = 0; y < space->size(); ++y) {
    for (std::size_t i = 0; i < n; ++i) coords[i] = space->factor_coordinate(y, pi[i]);
    g[y] = space->from_coordinates(coords);
  }
  return Embedding::from_surjection(space, space, std::move(g));
}

Embedding cylinder_embedding(const SpacePtr& product, std::size_t factor) {
  if (factor >= product->factors().size()) throw Error("no such factor");
  std::vector<std::size_t> g(product->size());
  for (std::size_t w = 0; w < g.size(); ++w) g[w] = product->factor_coordinate(w, factor);
  return Embedding::from_surjection(product->factors()[factor].space, product, std::move(g));
}

Embedding random_faithful_embedding(const SpacePtr& x, const SpacePtr& y, std::uint64_t seed) {
  const std::size_t nx = x->size(), ny = y->size();
  if (ny < nx) throw Error("no surjection from a smaller space");
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, nx - 1);
  std::vector<std::size_t> g(ny);
  for (int attempt = 0; attempt < 100000; ++attempt) {
    std::vector<bool> hit(nx, false);
    std::size_t distinct = 0;
    for (auto& v : g) {
      v = pick(rng);
      if (!hit[v]) {
        hit[v] = true;
        ++distinct;
      }
    }
    if (distinct == nx) return Embedding::from_surjection(x, y, g);
  }
  // Rejection essentially never gets here for desk-scale spaces; fall back
  // to a random bijection on a random subset plus uniform fill.
  std::vector<std::size_t> order(ny);
  for (std::size_t i = 0; i < ny; ++i) order[i] = i;
  std::shuffle(order.begin(), order.end(), rng);
  for (std::size_t i = 0; i < ny; ++i) g[order[i]] = i < nx ? i : pick(rng);
  return Embedding::from_surjection(x, y, std::move(g));
}

}  // namespace repind
