#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "repind/constraint.hpp"
#include "repind/embedding.hpp"
#include "repind/measure.hpp"

namespace repind {

struct EntailConfig {
  std::size_t max_disjuncts = kDefaultMaxDisjuncts;
  /// is_interesting refuses spaces with more worlds than this.
  std::size_t interesting_scan_limit = 16;
  /// Vertex enumeration is attempted only when the DNF has at most this many cells.
  std::size_t vertex_cell_limit = 64;
  /// Cap on active-set candidates examined per cell during vertex enumeration.
  std::size_t vertex_subset_limit = 200000;
  /// Random satisfying measures tested by conservative_check on top of vertices.
  std::size_t conservative_samples = 16;
  std::uint64_t seed = 0;
};

struct FeasibilityReport {
  bool feasible = false;
  /// Satisfies the queried constraint exactly.
  std::optional<ExactMeasure> witness;
  /// Index of the first feasible DNF system.
  std::optional<std::size_t> disjunct;
};

/// Per DNF system: exact LP  max t  s.t. simplex, equalities, a.x >= b for
/// non-strict rows and a.x - t >= b for strict rows, 0 <= t <= 1. The
/// system is nonempty iff the LP is feasible with t > 0 (or has no strict rows).
FeasibilityReport satisfiable(const Constraint& c, const EntailConfig& cfg = {});
FeasibilityReport satisfiable(const SpacePtr& space, const LinearSystem& system);

/// Every measure satisfying kb satisfies theta.
bool entails(const Constraint& kb, const Constraint& theta, const EntailConfig& cfg = {});
/// A measure satisfying kb but not theta, if any.
std::optional<ExactMeasure> entailment_counterexample(const Constraint& kb, const Constraint& theta,
                                                      const EntailConfig& cfg = {});
bool equivalent(const Constraint& a, const Constraint& b, const EntailConfig& cfg = {});

/// S if kb is equivalent to Pr(S) >= 1/4 for some S other than the empty
/// event and the whole space. The candidate is read off the point masses
/// satisfying kb and then confirmed by an equivalence check.
std::optional<Event> is_interesting(const Constraint& kb, const EntailConfig& cfg = {});

/// T if kb is equivalent to Pr(T) = 1. T is the set of worlds that some
/// satisfying measure charges; an unsatisfiable kb yields the empty event.
std::optional<Event> objective_normal_form(const Constraint& kb, const EntailConfig& cfg = {});

/// Worlds charged by some point of the cell of `system` that puts no mass
/// outside `allowed`, or nullopt when no such point exists.
std::optional<Event::Bits> cell_support(const LinearSystem& system, std::size_t n, const Event::Bits& allowed);

/// Vertices of the closure of `system` (strict rows relaxed), or nullopt when
/// the active-set search would exceed `subset_limit` candidates.
std::optional<std::vector<std::vector<Rational>>> enumerate_vertices(const LinearSystem& system, std::size_t n,
                                                                     std::size_t subset_limit);

/// Up to `count` distinct measures satisfying c exactly: vertices that lie
/// in c and strictly positive mixtures of each cell's vertices.
std::vector<ExactMeasure> sample_points(const Constraint& c, std::size_t count, std::uint64_t seed,
                                        const EntailConfig& cfg = {});

/// Range of a . x over [[c]] for per-world coefficients a.
struct ValueRange {
  Rational low;
  Rational high;
  bool low_attained = false;
  bool high_attained = false;
  std::optional<ExactMeasure> low_witness;
  std::optional<ExactMeasure> high_witness;
};
std::optional<ValueRange> value_range(const Constraint& c, const std::vector<Rational>& coefficients,
                                      const EntailConfig& cfg = {});
std::optional<ValueRange> prob_range(const Constraint& c, const Event& s, const EntailConfig& cfg = {});

enum class Conservativeness { kVerified, kNotConservative, kInconclusive };

struct ConservativeReport {
  Conservativeness status = Conservativeness::kInconclusive;
  /// A measure in [[kb]] with no extension satisfying kb & psi.
  std::optional<ExactMeasure> witness;
  std::size_t points_tested = 0;
  std::string note;
};

/// Tests whether psi on Z is conservative over kb on X, where `lift` embeds
/// X into Z (typically cylinder_embedding). The inclusion
/// proj([[kb & psi]]) subset of [[kb]] holds by construction; the other
/// direction is checked at every vertex of [[kb]] that lies in [[kb]] and
/// at seeded random points, by an exact extension LP per psi-system.
ConservativeReport conservative_check(const Constraint& kb, const Embedding& lift, const Constraint& psi,
                                      const EntailConfig& cfg = {});

}  // namespace repind
