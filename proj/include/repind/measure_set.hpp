#pragma once

#include <optional>
#include <variant>
#include <vector>

#include "repind/constraint.hpp"
#include "repind/embedding.hpp"
#include "repind/measure.hpp"

namespace repind {

/// A set of measures on one space: an explicit list, the denotation of a
/// constraint, or the fibre {nu : pushforward(f, nu) = base} of an
/// embedding. Fibres are infinite in general and only support membership.
class MeasureSet {
 public:
  struct FiniteList {
    SpacePtr space;
    std::vector<Measure> measures;
  };
  struct Denotation {
    Constraint constraint;
  };
  struct Fiber {
    Embedding embedding;
    Measure base;
  };

  static MeasureSet finite(SpacePtr space, std::vector<Measure> measures);
  static MeasureSet denotation(Constraint c) { return MeasureSet(Denotation{std::move(c)}); }
  static MeasureSet fiber(Embedding f, Measure base);

  const SpacePtr& space() const;
  bool is_finite() const { return std::holds_alternative<FiniteList>(data_); }
  bool is_denotation() const { return std::holds_alternative<Denotation>(data_); }
  bool is_fiber() const { return std::holds_alternative<Fiber>(data_); }
  const FiniteList& as_finite() const { return std::get<FiniteList>(data_); }
  const Denotation& as_denotation() const { return std::get<Denotation>(data_); }
  const Fiber& as_fiber() const { return std::get<Fiber>(data_); }

  /// Membership within eps (float backend).
  bool contains(const Measure& nu, double eps = 1e-9) const;

 private:
  using Data = std::variant<FiniteList, Denotation, Fiber>;
  explicit MeasureSet(Data d) : data_(std::move(d)) {}
  Data data_;
};

/// f*(mu): the measures on f's target corresponding to mu.
inline MeasureSet correspondents(const Embedding& f, const Measure& mu) { return MeasureSet::fiber(f, mu); }

/// Every nu in dy pushes forward into dx and every mu in dx is the
/// pushforward of some nu in dy (within eps).
bool correspond_sets(const Embedding& f, const std::vector<Measure>& dx, const std::vector<Measure>& dy,
                     double eps = 1e-9);

}  // namespace repind
