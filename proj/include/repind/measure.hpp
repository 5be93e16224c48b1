#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <random>
#include <string>
#include <type_traits>
#include <vector>

#include "repind/embedding.hpp"
#include "repind/error.hpp"
#include "repind/rational.hpp"
#include "repind/space.hpp"

namespace repind {

/// A probability vector over a space's worlds. `Scalar` is either Rational
/// (exact backend) or double (float backend); there are no implicit
/// conversions between the two.
template <class Scalar>
class BasicMeasure {
 public:
  static constexpr bool kExact = std::is_same_v<Scalar, Rational>;

  /// Validates non-negativity and total mass (exactly 1, or within 1e-12).
  BasicMeasure(SpacePtr space, std::vector<Scalar> weights)
      : space_(std::move(space)), weights_(std::move(weights)) {
    if (!space_) throw Error("measure without a space");
    if (weights_.size() != space_->size()) throw Error("measure length does not match the space");
    Scalar total = 0;
    for (auto& w : weights_) {
      if constexpr (kExact) w.canonicalize();
      if (w < 0) throw Error("negative probability");
      total += w;
    }
    if constexpr (kExact) {
      if (total != 1) throw Error("measure does not sum to 1 (sum " + to_string(total) + ")");
    } else {
      if (!(std::abs(total - 1.0) <= 1e-12)) throw Error("measure does not sum to 1");
    }
  }

  /// Scales non-negative weights to total mass 1.
  static BasicMeasure normalized(SpacePtr space, std::vector<Scalar> weights) {
    Scalar total = 0;
    for (const auto& w : weights) total += w;
    if (!(total > 0)) throw Error("cannot normalise a zero vector");
    for (auto& w : weights) w /= total;
    if constexpr (!kExact) {
      // One more pass keeps the float sum inside the 1e-12 contract.
      Scalar again = std::accumulate(weights.begin(), weights.end(), Scalar(0));
      for (auto& w : weights) w /= again;
    }
    return BasicMeasure(std::move(space), std::move(weights));
  }

  static BasicMeasure uniform(SpacePtr space) {
    const auto n = space->size();
    return BasicMeasure(std::move(space), std::vector<Scalar>(n, Scalar(1) / Scalar(static_cast<long>(n))));
  }

  static BasicMeasure point_mass(SpacePtr space, std::size_t world) {
    std::vector<Scalar> w(space->size(), Scalar(0));
    w.at(world) = 1;
    return BasicMeasure(std::move(space), std::move(w));
  }

  const SpacePtr& space() const { return space_; }
  std::size_t size() const { return weights_.size(); }
  const Scalar& operator[](std::size_t i) const { return weights_[i]; }
  const std::vector<Scalar>& weights() const { return weights_; }

  Scalar prob(const Event& e) const {
    if (!same_space(e.space(), space_)) throw Error("event and measure live on different spaces");
    Scalar p = 0;
    for (auto w : e.worlds()) p += weights_[w];
    return p;
  }

  Event support() const {
    Event::Bits b(weights_.size());
    for (std::size_t i = 0; i < weights_.size(); ++i)
      if (weights_[i] > 0) b.set(i);
    return Event(space_, std::move(b));
  }

  friend bool operator==(const BasicMeasure& a, const BasicMeasure& b) {
    return same_space(a.space_, b.space_) && a.weights_ == b.weights_;
  }

 private:
  SpacePtr space_;
  std::vector<Scalar> weights_;
};

using ExactMeasure = BasicMeasure<Rational>;
using Measure = BasicMeasure<double>;

Measure to_float(const ExactMeasure& m);
/// Exact image of the doubles, renormalised so the total is exactly 1.
ExactMeasure to_exact(const Measure& m);

/// Max-norm distance; spaces must match.
double distance(const Measure& a, const Measure& b);
bool approx_equal(const Measure& a, const Measure& b, double eps);

/// Shannon entropy in bits, with 0 log 0 = 0.
double entropy(const Measure& mu);

/// Relative entropy D(mu_prime || mu) in bits; +infinity when mu_prime puts
/// mass where mu has none.
double kl_divergence(const Measure& mu_prime, const Measure& mu);

/// mu(. | s). Throws Error("conditioning on null event") if mu(s) = 0.
template <class Scalar>
BasicMeasure<Scalar> condition(const BasicMeasure<Scalar>& mu, const Event& s) {
  Scalar mass = mu.prob(s);
  if (!(mass > 0)) throw Error("conditioning on null event");
  std::vector<Scalar> w(mu.size(), Scalar(0));
  for (auto x : s.worlds()) w[x] = mu[x] / mass;
  if constexpr (BasicMeasure<Scalar>::kExact) return BasicMeasure<Scalar>(mu.space(), std::move(w));
  else return BasicMeasure<Scalar>::normalized(mu.space(), std::move(w));
}

/// The unique measure on f's source with mu(S) = nu(f(S)).
template <class Scalar>
BasicMeasure<Scalar> pushforward(const Embedding& f, const BasicMeasure<Scalar>& nu) {
  if (!same_space(nu.space(), f.target())) throw Error("pushforward: measure is not on the embedding's target");
  std::vector<Scalar> w(f.source()->size(), Scalar(0));
  for (std::size_t x = 0; x < w.size(); ++x) w[x] = nu.prob(f.image(x));
  if constexpr (BasicMeasure<Scalar>::kExact) return BasicMeasure<Scalar>(f.source(), std::move(w));
  else return BasicMeasure<Scalar>::normalized(f.source(), std::move(w));
}

bool corresponds(const Embedding& f, const ExactMeasure& mu, const ExactMeasure& nu);
bool corresponds(const Embedding& f, const Measure& mu, const Measure& nu, double eps = 1e-9);

/// Product of measures on the declared factors of `product`, in factor order.
template <class Scalar>
BasicMeasure<Scalar> product_measure(const SpacePtr& product, const std::vector<BasicMeasure<Scalar>>& parts) {
  if (!product->is_product()) {
    if (parts.size() == 1 && same_space(parts[0].space(), product)) return parts[0];
    throw Error("product_measure: space has no declared factors");
  }
  const auto& factors = product->factors();
  if (parts.size() != factors.size()) throw Error("product_measure: factor count mismatch");
  for (std::size_t i = 0; i < parts.size(); ++i)
    if (!same_space(parts[i].space(), factors[i].space)) throw Error("product_measure: factor space mismatch");
  std::vector<Scalar> w(product->size(), Scalar(1));
  for (std::size_t x = 0; x < w.size(); ++x)
    for (std::size_t i = 0; i < parts.size(); ++i) w[x] *= parts[i][product->factor_coordinate(x, i)];
  if constexpr (BasicMeasure<Scalar>::kExact) return BasicMeasure<Scalar>(product, std::move(w));
  else return BasicMeasure<Scalar>::normalized(product, std::move(w));
}

/// Builds product_space(a, b) and the product measure on it.
template <class Scalar>
BasicMeasure<Scalar> product_measure(const std::vector<BasicMeasure<Scalar>>& parts) {
  std::vector<SpacePtr> spaces;
  for (const auto& p : parts) spaces.push_back(p.space());
  return product_measure(product_space(spaces), parts);
}

/// Marginal of mu on factor `i` of a product decomposition.
template <class Scalar>
std::vector<BasicMeasure<Scalar>> marginals(const BasicMeasure<Scalar>& mu, const Decomposition& d) {
  std::vector<BasicMeasure<Scalar>> out;
  for (std::size_t i = 0; i < d.factors.size(); ++i) {
    std::vector<Scalar> w(d.factors[i]->size(), Scalar(0));
    for (std::size_t x = 0; x < mu.size(); ++x) w[d.coordinates[x][i]] += mu[x];
    if constexpr (BasicMeasure<Scalar>::kExact) out.emplace_back(d.factors[i], std::move(w));
    else out.push_back(BasicMeasure<Scalar>::normalized(d.factors[i], std::move(w)));
  }
  return out;
}

/// True iff mu equals the product of its marginals over the product
/// decomposition of its space (vacuously true for indecomposable spaces).
bool is_product_measure(const ExactMeasure& mu);
bool is_product_measure(const Measure& mu, double eps = 1e-9);

/// A coupling: a measure on x0 x x1 whose
/// marginals are mu0 and mu1 and which gives (s0 x s1) u (~s0 x ~s1)
/// probability 1. Requires mu0(s0) = mu1(s1).
ExactMeasure couple(const ExactMeasure& mu0, const Event& s0, const ExactMeasure& mu1, const Event& s1);

/// The event (s0 x s1) u (~s0 x ~s1) on product_space(s0.space, s1.space).
Event iff_event(const SpacePtr& product, const Event& s0, const Event& s1);

/// |lhs - rhs| of the chain rule
///   D(nu2 || nu) = D(f^-1 nu2 || f^-1 nu) + sum_i D(nu2|Y_i || nu|Y_i)
/// where Y_i = f({x_i}) and the sum runs over fibres with nu2(Y_i) > 0,
/// each term weighted by nu2(Y_i) (the standard conditional form). Returns
/// 0 when both sides are infinite.
double kl_chain_identity_residual(const Measure& nu2, const Measure& nu, const Embedding& f);

/// Dirichlet(concentration) sample; small concentrations favour skewed measures.
Measure random_measure(const SpacePtr& space, std::mt19937_64& rng, double concentration = 1.0);
/// Random integer weights in [0, max_weight] (not all zero), normalised exactly.
ExactMeasure random_exact_measure(const SpacePtr& space, std::mt19937_64& rng, int max_weight = 10);

std::string to_string(const Measure& mu, int precision = 6);
std::string to_string(const ExactMeasure& mu);

}  // namespace repind
