#include "repind/measure_set.hpp"

#include "repind/error.hpp"

namespace repind {

MeasureSet MeasureSet::finite(SpacePtr space, std::vector<Measure> measures) {
  for (const auto& m : measures)
    if (!same_space(m.space(), space)) throw Error("finite measure set mixes spaces");
  return MeasureSet(FiniteList{std::move(space), std::move(measures)});
}

MeasureSet MeasureSet::fiber(Embedding f, Measure base) {
  if (!same_space(base.space(), f.source())) throw Error("fibre base is not on the embedding's source");
  return MeasureSet(Fiber{std::move(f), std::move(base)});
}

const SpacePtr& MeasureSet::space() const {
  if (auto* l = std::get_if<FiniteList>(&data_)) return l->space;
  if (auto* d = std::get_if<Denotation>(&data_)) return d->constraint.space();
  return std::get<Fiber>(data_).embedding.target();
}

bool MeasureSet::contains(const Measure& nu, double eps) const {
  if (!same_space(nu.space(), space())) return false;
  if (auto* l = std::get_if<FiniteList>(&data_)) {
    for (const auto& m : l->measures)
      if (approx_equal(m, nu, eps)) return true;
    return false;
  }
  if (auto* d = std::get_if<Denotation>(&data_)) return satisfies(nu, d->constraint, eps);
  const auto& f = std::get<Fiber>(data_);
  return corresponds(f.embedding, f.base, nu, eps);
}

bool correspond_sets(const Embedding& f, const std::vector<Measure>& dx, const std::vector<Measure>& dy, double eps) {
  std::vector<Measure> pushed;
  for (const auto& nu : dy) pushed.push_back(pushforward(f, nu));
  for (const auto& p : pushed) {
    bool found = false;
    for (const auto& mu : dx) found = found || approx_equal(mu, p, eps);
    if (!found) return false;
  }
  for (const auto& mu : dx) {
    bool found = false;
    for (const auto& p : pushed) found = found || approx_equal(mu, p, eps);
    if (!found) return false;
  }
  return true;
}

}  // namespace repind
