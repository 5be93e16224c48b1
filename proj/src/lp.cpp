#include "repind/lp.hpp"

#include <optional>

#include "repind/error.hpp"

namespace repind::lp {
namespace {

// Tableau with rows 0..m-1 as constraints and the objective kept separately
// as reduced costs. Columns: original vars, slacks/surpluses, artificials.
class Tableau {
 public:
  Tableau(std::size_t m, std::size_t n) : m_(m), n_(n), a_(m, std::vector<Rational>(n + 1)), basis_(m) {}

  Rational& at(std::size_t r, std::size_t c) { return a_[r][c]; }
  Rational& rhs(std::size_t r) { return a_[r][n_]; }
  std::size_t& basis(std::size_t r) { return basis_[r]; }

  void pivot(std::size_t r, std::size_t c, std::vector<Rational>& cost, Rational& cost_rhs) {
    Rational p = a_[r][c];
    for (auto& v : a_[r])
      if (v != 0) v /= p;
    for (std::size_t i = 0; i < m_; ++i) {
      if (i == r || a_[i][c] == 0) continue;
      Rational f = a_[i][c];
      for (std::size_t j = 0; j <= n_; ++j)
        if (a_[r][j] != 0) a_[i][j] -= f * a_[r][j];
    }
    if (cost[c] != 0) {
      Rational f = cost[c];
      for (std::size_t j = 0; j < n_; ++j)
        if (a_[r][j] != 0) cost[j] -= f * a_[r][j];
      cost_rhs -= f * a_[r][n_];
    }
    basis_[r] = c;
  }

  /// Maximizes with reduced costs `cost` (cost[j] < 0 means entering j
  /// improves). Columns with allowed[j] == false never enter.
  Status run(std::vector<Rational>& cost, Rational& value, const std::vector<bool>& allowed) {
    while (true) {
      std::optional<std::size_t> enter;
      for (std::size_t j = 0; j < n_; ++j)
        if (allowed[j] && cost[j] < 0) {
          enter = j;
          break;
        }
      if (!enter) return Status::kOptimal;
      std::optional<std::size_t> leave;
      Rational best;
      for (std::size_t i = 0; i < m_; ++i) {
        if (a_[i][*enter] <= 0) continue;
        Rational ratio = a_[i][n_] / a_[i][*enter];
        if (!leave || ratio < best || (ratio == best && basis_[i] < basis_[*leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (!leave) return Status::kUnbounded;
      pivot(*leave, *enter, cost, value);
    }
  }

  std::size_t rows() const { return m_; }
  std::size_t cols() const { return n_; }

 private:
  std::size_t m_, n_;
  std::vector<std::vector<Rational>> a_;
  std::vector<std::size_t> basis_;
};

}  // namespace

Solution solve(const Problem& problem) {
  const std::size_t n = problem.num_vars;
  const std::size_t m = problem.rows.size();
  for (const auto& r : problem.rows)
    if (r.coefficients.size() != n) throw Error("lp: row width does not match variable count");
  if (!problem.objective.empty() && problem.objective.size() != n) throw Error("lp: objective width mismatch");

  // Normalise to non-negative right-hand sides.
  std::vector<Row> rows = problem.rows;
  for (auto& r : rows) {
    if (r.rhs < 0) {
      for (auto& c : r.coefficients) c = -c;
      r.rhs = -r.rhs;
      if (r.sense == Sense::kLessEq) r.sense = Sense::kGreaterEq;
      else if (r.sense == Sense::kGreaterEq) r.sense = Sense::kLessEq;
    }
  }
  std::size_t slack_count = 0, artificial_count = 0;
  for (const auto& r : rows) {
    if (r.sense != Sense::kEqual) ++slack_count;
    if (r.sense != Sense::kLessEq) ++artificial_count;
  }
  const std::size_t total = n + slack_count + artificial_count;
  Tableau t(m, total);
  std::size_t next_slack = n, next_art = n + slack_count;
  std::vector<bool> is_artificial(total, false);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) t.at(i, j) = rows[i].coefficients[j];
    t.rhs(i) = rows[i].rhs;
    switch (rows[i].sense) {
      case Sense::kLessEq:
        t.at(i, next_slack) = 1;
        t.basis(i) = next_slack++;
        break;
      case Sense::kGreaterEq:
        t.at(i, next_slack++) = -1;
        t.at(i, next_art) = 1;
        is_artificial[next_art] = true;
        t.basis(i) = next_art++;
        break;
      case Sense::kEqual:
        t.at(i, next_art) = 1;
        is_artificial[next_art] = true;
        t.basis(i) = next_art++;
        break;
    }
  }

  // Phase 1: maximize -sum(artificials).
  std::vector<bool> allowed(total, true);
  if (artificial_count > 0) {
    std::vector<Rational> cost(total, Rational(0));
    Rational value = 0;
    for (std::size_t j = 0; j < total; ++j)
      if (is_artificial[j]) cost[j] = 1;
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[t.basis(i)]) continue;
      for (std::size_t j = 0; j < total; ++j) cost[j] -= t.at(i, j);
      value -= t.rhs(i);
    }
    t.run(cost, value, allowed);
    if (value != 0) return Solution{Status::kInfeasible, {}, {}};
    // Drive remaining (zero-valued) artificials out of the basis.
    for (std::size_t i = 0; i < m; ++i) {
      if (!is_artificial[t.basis(i)]) continue;
      for (std::size_t j = 0; j < total; ++j) {
        if (!is_artificial[j] && t.at(i, j) != 0) {
          std::vector<Rational> dummy(total, Rational(0));
          Rational dv = 0;
          t.pivot(i, j, dummy, dv);
          break;
        }
      }
    }
    for (std::size_t j = 0; j < total; ++j)
      if (is_artificial[j]) allowed[j] = false;
  }

  // Phase 2.
  std::vector<Rational> cost(total, Rational(0));
  Rational value = 0;
  if (!problem.objective.empty()) {
    for (std::size_t j = 0; j < n; ++j) cost[j] = -problem.objective[j];
    for (std::size_t i = 0; i < m; ++i) {
      const std::size_t b = t.basis(i);
      if (b < n && problem.objective[b] != 0) {
        Rational f = cost[b];
        for (std::size_t j = 0; j < total; ++j) cost[j] -= f * t.at(i, j);
        value -= f * t.rhs(i);
      }
    }
    if (t.run(cost, value, allowed) == Status::kUnbounded) return Solution{Status::kUnbounded, {}, {}};
  }
  Solution sol{Status::kOptimal, std::vector<Rational>(n, Rational(0)), value};
  for (std::size_t i = 0; i < m; ++i)
    if (t.basis(i) < n) sol.x[t.basis(i)] = t.rhs(i);
  sol.value = 0;
  if (!problem.objective.empty())
    for (std::size_t j = 0; j < n; ++j) sol.value += problem.objective[j] * sol.x[j];
  return sol;
}

}  // namespace repind::lp
