#pragma once

#include <cstddef>
#include <vector>

#include "repind/rational.hpp"

namespace repind::lp {

enum class Sense { kLessEq, kEqual, kGreaterEq };

struct Row {
  std::vector<Rational> coefficients;
  Sense sense;
  Rational rhs;
};

/// maximize objective . x  subject to rows, x >= 0.
struct Problem {
  std::size_t num_vars = 0;
  std::vector<Row> rows;
  std::vector<Rational> objective;  // empty means pure feasibility
};

enum class Status { kOptimal, kInfeasible, kUnbounded };

struct Solution {
  Status status = Status::kInfeasible;
  std::vector<Rational> x;
  Rational value;
};

/// Dense two-phase simplex over exact rationals with Bland's rule.
Solution solve(const Problem& problem);

}  // namespace repind::lp
