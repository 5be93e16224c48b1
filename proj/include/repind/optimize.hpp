#pragma once

#include <cstddef>
#include <limits>
#include <string>
#include <vector>

#include "repind/constraint.hpp"
#include "repind/measure.hpp"

namespace repind {

struct ProjectionConfig {
  /// Residual tolerance of each one-dimensional tilt.
  double root_tol = 1e-12;
  /// Margin a strict row must clear at the closure optimum.
  double strict_eps = 1e-9;
  std::size_t max_cycles = 100000;
  std::size_t max_disjuncts = kDefaultMaxDisjuncts;
  double residual_tol = 1e-10;
  double movement_tol = 1e-12;
  /// Disjunct values within this of the optimum count as ties.
  double tie_tol = 1e-9;
};

enum class ProjectionStatus { kAttained, kNotAttained, kEmpty };
std::string to_string(ProjectionStatus s);

struct DisjunctDiagnostic {
  std::size_t index = 0;
  /// False when the cell is empty or needs mass outside the prior's support.
  bool finite = false;
  /// Divergence of the closure optimum (+inf when !finite).
  double divergence = std::numeric_limits<double>::infinity();
  bool strict_ok = false;
  std::size_t cycles = 0;
  std::string note;
};

struct ProjectionResult {
  ProjectionStatus status = ProjectionStatus::kEmpty;
  /// Attainers, deduplicated and sorted by weight vector.
  std::vector<Measure> measures;
  /// KL divergence in bits for kl_project, entropy in bits for maxent;
  /// NaN when the status is kEmpty.
  double value = std::numeric_limits<double>::quiet_NaN();
  std::vector<DisjunctDiagnostic> diagnostics;
};

/// The measures of [[kb]] closest to mu in relative entropy. Each DNF cell is
/// handled over its closure by cyclic dual coordinate ascent (each step an
/// exact tilt onto one row); strict rows are then checked with strict_eps.
ProjectionResult kl_project(const Measure& mu, const Constraint& kb, const ProjectionConfig& cfg = {});

/// The measures of [[kb]] of highest entropy: the projection of the uniform
/// measure, reported with value log2|X| - D.
ProjectionResult maxent(const Constraint& kb, const ProjectionConfig& cfg = {});

/// mu'(x) proportional to mu(x) exp(lambda a(x)) with lambda chosen so that
/// the atom holds with equality. An inequality atom already satisfied
/// returns mu unchanged. Throws Error("unreachable constraint") when the
/// bound lies outside the values reachable on supp(mu).
Measure halfspace_tilt(const Measure& mu, const LinearAtom& atom, double root_tol = 1e-12);

/// Union of the attainers of each prior's projection, deduplicated within
/// eps. Throws DomainError if some projection is not attained.
std::vector<Measure> update_set(const std::vector<Measure>& priors, const Constraint& kb,
                                const ProjectionConfig& cfg = {}, double eps = 1e-9);

}  // namespace repind
