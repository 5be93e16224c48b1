#include "repind/entail.hpp"

#include <algorithm>
#include <random>
#include <set>

#include "repind/error.hpp"
#include "repind/lp.hpp"

namespace repind {
namespace {

using Point = std::vector<Rational>;

lp::Row widen(const std::vector<Rational>& a, lp::Sense sense, const Rational& rhs, std::size_t width) {
  lp::Row r{a, sense, rhs};
  r.coefficients.resize(width, Rational(0));
  return r;
}

/// Rows of a system's closure plus the simplex, over n variables (and the
/// slack t as variable n when `with_slack`).
lp::Problem cell_problem(const LinearSystem& s, std::size_t n, const std::vector<lp::Row>& extra, bool with_slack) {
  const std::size_t width = n + (with_slack ? 1 : 0);
  lp::Problem p;
  p.num_vars = width;
  p.rows.push_back(widen(Point(n, Rational(1)), lp::Sense::kEqual, 1, width));
  for (const auto& r : s.equalities) p.rows.push_back(widen(r.coefficients, lp::Sense::kEqual, r.bound, width));
  for (const auto& r : s.inequalities) p.rows.push_back(widen(r.coefficients, lp::Sense::kGreaterEq, r.bound, width));
  for (const auto& r : s.strict) {
    auto row = widen(r.coefficients, lp::Sense::kGreaterEq, r.bound, width);
    if (with_slack) row.coefficients[n] = -1;
    p.rows.push_back(std::move(row));
  }
  for (const auto& r : extra) {
    auto row = r;
    row.coefficients.resize(width, Rational(0));
    p.rows.push_back(std::move(row));
  }
  if (with_slack) {
    Point t(width, Rational(0));
    t[n] = 1;
    p.rows.push_back(lp::Row{t, lp::Sense::kLessEq, 1});
    p.objective = t;
  }
  return p;
}

/// A point of the cell (strict rows honoured) satisfying the extra rows too.
std::optional<Point> solve_cell(const LinearSystem& s, std::size_t n, const std::vector<lp::Row>& extra = {}) {
  const bool strict = !s.strict.empty();
  auto sol = lp::solve(cell_problem(s, n, extra, strict));
  if (sol.status != lp::Status::kOptimal) return std::nullopt;
  if (strict && sol.value <= 0) return std::nullopt;
  sol.x.resize(n);
  return sol.x;
}

LinearSystem closure(const LinearSystem& s) {
  LinearSystem c = s;
  c.inequalities.insert(c.inequalities.end(), s.strict.begin(), s.strict.end());
  c.strict.clear();
  return c;
}

/// Unique solution of rows . x = rhs when the rows have rank n.
std::optional<Point> unique_solution(std::vector<Point> m, Point rhs, std::size_t n) {
  const std::size_t rows = m.size();
  std::size_t rank = 0;
  std::vector<std::size_t> pivot_col;
  for (std::size_t c = 0; c < n && rank < rows; ++c) {
    std::size_t p = rank;
    while (p < rows && m[p][c] == 0) ++p;
    if (p == rows) continue;
    std::swap(m[p], m[rank]);
    std::swap(rhs[p], rhs[rank]);
    Rational inv = 1 / m[rank][c];
    for (std::size_t j = c; j < n; ++j) m[rank][j] *= inv;
    rhs[rank] *= inv;
    for (std::size_t i = 0; i < rows; ++i) {
      if (i == rank || m[i][c] == 0) continue;
      Rational f = m[i][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[rank][j];
      rhs[i] -= f * rhs[rank];
    }
    pivot_col.push_back(c);
    ++rank;
  }
  for (std::size_t i = rank; i < rows; ++i)
    if (rhs[i] != 0) return std::nullopt;
  if (rank < n) return std::nullopt;
  Point x(n);
  for (std::size_t i = 0; i < rank; ++i) x[pivot_col[i]] = rhs[i];
  return x;
}

std::size_t matrix_rank(std::vector<Point> m, std::size_t n) {
  std::size_t rank = 0;
  for (std::size_t c = 0; c < n && rank < m.size(); ++c) {
    std::size_t p = rank;
    while (p < m.size() && m[p][c] == 0) ++p;
    if (p == m.size()) continue;
    std::swap(m[p], m[rank]);
    for (std::size_t i = rank + 1; i < m.size(); ++i) {
      if (m[i][c] == 0) continue;
      Rational f = m[i][c] / m[rank][c];
      for (std::size_t j = c; j < n; ++j) m[i][j] -= f * m[rank][j];
    }
    ++rank;
  }
  return rank;
}

Rational dot(const Point& a, const Point& x) {
  Rational s = 0;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (a[i] != 0) s += a[i] * x[i];
  return s;
}

double binomial(std::size_t m, std::size_t k) {
  double r = 1;
  for (std::size_t i = 0; i < k; ++i) r = r * static_cast<double>(m - i) / static_cast<double>(i + 1);
  return r;
}

Constraint conjunction(const Constraint& a, const Constraint& b) { return Constraint::all_of(a.space(), {a, b}); }

}  // namespace

FeasibilityReport satisfiable(const SpacePtr& space, const LinearSystem& system) {
  auto x = solve_cell(system, space->size());
  if (!x) return {};
  return FeasibilityReport{true, ExactMeasure(space, std::move(*x)), 0};
}

FeasibilityReport satisfiable(const Constraint& c, const EntailConfig& cfg) {
  auto dnf = to_dnf(c, cfg.max_disjuncts);
  for (std::size_t i = 0; i < dnf.systems.size(); ++i) {
    auto x = solve_cell(dnf.systems[i], c.space()->size());
    if (x) return FeasibilityReport{true, ExactMeasure(c.space(), std::move(*x)), i};
  }
  return {};
}

std::optional<ExactMeasure> entailment_counterexample(const Constraint& kb, const Constraint& theta,
                                                      const EntailConfig& cfg) {
  auto r = satisfiable(conjunction(kb, Constraint::negation(theta)), cfg);
  if (!r.feasible) return std::nullopt;
  return r.witness;
}

bool entails(const Constraint& kb, const Constraint& theta, const EntailConfig& cfg) {
  return !entailment_counterexample(kb, theta, cfg).has_value();
}

bool equivalent(const Constraint& a, const Constraint& b, const EntailConfig& cfg) {
  return entails(a, b, cfg) && entails(b, a, cfg);
}

std::optional<Event> is_interesting(const Constraint& kb, const EntailConfig& cfg) {
  const auto& space = kb.space();
  if (space->size() > cfg.interesting_scan_limit)
    throw LimitError("is_interesting: space has " + std::to_string(space->size()) + " worlds; scan limit is " +
                     std::to_string(cfg.interesting_scan_limit));
  if (kb.has_product_atoms()) throw Error("is_interesting: product atoms are not supported");
  // If kb is Pr(S) >= 1/4 then the point mass at x satisfies kb iff x is in S.
  Event::Bits members(space->size());
  for (std::size_t x = 0; x < space->size(); ++x)
    if (satisfies(ExactMeasure::point_mass(space, x), kb)) members.set(x);
  Event s(space, std::move(members));
  if (s.empty() || s.is_all()) return std::nullopt;
  if (!equivalent(kb, prob(s, Comparator::kGreaterEq, Rational(1, 4)), cfg)) return std::nullopt;
  return s;
}

std::optional<Event::Bits> cell_support(const LinearSystem& system, std::size_t n, const Event::Bits& allowed) {
  std::vector<lp::Row> zeros;
  for (std::size_t x = 0; x < n; ++x)
    if (!allowed.test(x)) {
      Point e(n, Rational(0));
      e[x] = 1;
      zeros.push_back(lp::Row{std::move(e), lp::Sense::kEqual, 0});
    }
  auto base = solve_cell(system, n, zeros);
  if (!base) return std::nullopt;
  Event::Bits found(n);
  for (std::size_t x = 0; x < n; ++x)
    if ((*base)[x] > 0) found.set(x);
  // Any closure point mixed with `base` stays in the cell, so the charged
  // worlds are those of the closure; grow them one LP at a time.
  const LinearSystem cl = closure(system);
  while (true) {
    Point objective(n, Rational(0));
    bool any = false;
    for (std::size_t x = 0; x < n; ++x)
      if (allowed.test(x) && !found.test(x)) {
        objective[x] = 1;
        any = true;
      }
    if (!any) break;
    lp::Problem p = cell_problem(cl, n, zeros, false);
    p.objective = objective;
    auto sol = lp::solve(p);
    if (sol.status != lp::Status::kOptimal || sol.value == 0) break;
    for (std::size_t x = 0; x < n; ++x)
      if (sol.x[x] > 0) found.set(x);
  }
  return found;
}

std::optional<Event> objective_normal_form(const Constraint& kb, const EntailConfig& cfg) {
  const auto& space = kb.space();
  const std::size_t n = space->size();
  auto dnf = to_dnf(kb, cfg.max_disjuncts);
  Event::Bits all(n);
  all.set();
  Event::Bits members(n);
  for (const auto& system : dnf.systems)
    if (auto s = cell_support(system, n, all)) members |= *s;
  Event t(space, std::move(members));
  if (t.empty()) return t;  // kb unsatisfiable, same as Pr(empty) = 1
  if (!entails(prob(t, Comparator::kEqual, 1), kb, cfg)) return std::nullopt;
  return t;
}

std::optional<std::vector<Point>> enumerate_vertices(const LinearSystem& system, std::size_t n,
                                                     std::size_t subset_limit) {
  LinearSystem cl = closure(system);
  std::vector<Point> eq_rows{Point(n, Rational(1))};
  Point eq_rhs{Rational(1)};
  for (const auto& r : cl.equalities) {
    eq_rows.push_back(r.coefficients);
    eq_rhs.push_back(r.bound);
  }
  std::vector<Point> ineq_rows;
  Point ineq_rhs;
  for (std::size_t i = 0; i < n; ++i) {
    Point e(n, Rational(0));
    e[i] = 1;
    ineq_rows.push_back(std::move(e));
    ineq_rhs.push_back(0);
  }
  for (const auto& r : cl.inequalities) {
    ineq_rows.push_back(r.coefficients);
    ineq_rhs.push_back(r.bound);
  }
  if (!solve_cell(cl, n)) return std::vector<Point>{};
  const std::size_t rank_eq = matrix_rank(eq_rows, n);
  const std::size_t k = n - rank_eq;
  const std::size_t m = ineq_rows.size();
  if (k > m || binomial(m, k) > static_cast<double>(subset_limit)) return std::nullopt;

  std::set<Point> vertices;
  std::vector<bool> pick(m, false);
  std::fill(pick.begin(), pick.begin() + static_cast<long>(k), true);
  do {
    std::vector<Point> rows = eq_rows;
    Point rhs = eq_rhs;
    for (std::size_t i = 0; i < m; ++i)
      if (pick[i]) {
        rows.push_back(ineq_rows[i]);
        rhs.push_back(ineq_rhs[i]);
      }
    auto x = unique_solution(std::move(rows), std::move(rhs), n);
    if (!x) continue;
    bool feasible = true;
    for (std::size_t i = 0; i < m && feasible; ++i) feasible = dot(ineq_rows[i], *x) >= ineq_rhs[i];
    if (feasible) vertices.insert(std::move(*x));
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return std::vector<Point>(vertices.begin(), vertices.end());
}

std::vector<ExactMeasure> sample_points(const Constraint& c, std::size_t count, std::uint64_t seed,
                                        const EntailConfig& cfg) {
  const auto& space = c.space();
  const std::size_t n = space->size();
  auto dnf = to_dnf(c, cfg.max_disjuncts);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> weight(1, 12);

  struct Cell {
    std::vector<Point> corners;
    std::vector<Point> inside;
  };
  std::vector<Cell> cells;
  for (const auto& system : dnf.systems) {
    if (!solve_cell(system, n)) continue;
    Cell cell;
    std::optional<std::vector<Point>> vs;
    if (dnf.systems.size() <= cfg.vertex_cell_limit) vs = enumerate_vertices(system, n, cfg.vertex_subset_limit);
    if (vs) {
      cell.corners = std::move(*vs);
    } else {
      // Fallback: optimal vertices of random objectives over the closure.
      auto cl = closure(system);
      for (std::size_t k = 0; k < 2 * n + 2; ++k) {
        lp::Problem p = cell_problem(cl, n, {}, false);
        p.objective.resize(n);
        for (auto& v : p.objective) v = Rational(weight(rng) - 6);
        auto sol = lp::solve(p);
        if (sol.status == lp::Status::kOptimal) cell.corners.push_back(sol.x);
      }
      std::sort(cell.corners.begin(), cell.corners.end());
      cell.corners.erase(std::unique(cell.corners.begin(), cell.corners.end()), cell.corners.end());
    }
    for (const auto& v : cell.corners)
      if (system.satisfied_by(v)) cell.inside.push_back(v);
    cells.push_back(std::move(cell));
  }

  std::vector<ExactMeasure> out;
  std::set<Point> seen;
  auto offer = [&](const Point& x) {
    if (out.size() >= count || seen.count(x)) return;
    ExactMeasure m(space, x);
    if (!satisfies(m, c)) return;
    seen.insert(x);
    out.push_back(std::move(m));
  };
  // Corners that belong to the set first, then random interior mixtures.
  for (const auto& cell : cells)
    for (const auto& v : cell.inside) offer(v);
  for (std::size_t round = 0; out.size() < count && round < 8 * count + 8 && !cells.empty(); ++round) {
    const auto& cell = cells[round % cells.size()];
    if (cell.corners.empty()) continue;
    Point x(n, Rational(0));
    Rational total = 0;
    for (const auto& v : cell.corners) {
      Rational w(weight(rng));
      total += w;
      for (std::size_t i = 0; i < n; ++i) x[i] += w * v[i];
    }
    for (auto& xi : x) xi /= total;
    offer(x);
  }
  return out;
}

std::optional<ValueRange> value_range(const Constraint& c, const std::vector<Rational>& a, const EntailConfig& cfg) {
  const auto& space = c.space();
  const std::size_t n = space->size();
  auto dnf = to_dnf(c, cfg.max_disjuncts);
  std::optional<ValueRange> range;
  for (const auto& system : dnf.systems) {
    if (!solve_cell(system, n)) continue;
    auto cl = closure(system);
    auto optimum = [&](bool maximize) {
      lp::Problem p = cell_problem(cl, n, {}, false);
      p.objective = a;
      if (!maximize)
        for (auto& v : p.objective) v = -v;
      auto sol = lp::solve(p);
      return maximize ? sol.value : Rational(-sol.value);
    };
    const Rational lo = optimum(false), hi = optimum(true);
    auto attained_at = [&](const Rational& v) -> std::optional<ExactMeasure> {
      auto x = solve_cell(system, n, {widen(a, lp::Sense::kEqual, v, n)});
      if (!x) return std::nullopt;
      return ExactMeasure(space, std::move(*x));
    };
    auto lo_w = attained_at(lo);
    auto hi_w = attained_at(hi);
    if (!range) {
      range = ValueRange{lo, hi, lo_w.has_value(), hi_w.has_value(), lo_w, hi_w};
      continue;
    }
    if (lo < range->low || (lo == range->low && !range->low_attained && lo_w)) {
      range->low = lo;
      range->low_attained = lo_w.has_value();
      range->low_witness = lo_w;
    }
    if (hi > range->high || (hi == range->high && !range->high_attained && hi_w)) {
      range->high = hi;
      range->high_attained = hi_w.has_value();
      range->high_witness = hi_w;
    }
  }
  return range;
}

std::optional<ValueRange> prob_range(const Constraint& c, const Event& s, const EntailConfig& cfg) {
  std::vector<Rational> a(c.space()->size(), Rational(0));
  for (auto w : s.worlds()) a[w] = 1;
  return value_range(c, a, cfg);
}

ConservativeReport conservative_check(const Constraint& kb, const Embedding& lift, const Constraint& psi,
                                      const EntailConfig& cfg) {
  if (!same_space(kb.space(), lift.source()) || !same_space(psi.space(), lift.target()))
    throw Error("conservative_check: kb, psi and the lift do not line up");
  const auto& x_space = kb.space();
  const auto& z_space = psi.space();
  const std::size_t nx = x_space->size(), nz = z_space->size();
  ConservativeReport report;

  auto kb_dnf = to_dnf(kb, cfg.max_disjuncts);
  auto psi_dnf = to_dnf(psi, cfg.max_disjuncts);

  std::vector<ExactMeasure> points;
  bool vertex_complete = kb_dnf.systems.size() <= cfg.vertex_cell_limit;
  if (vertex_complete) {
    for (const auto& system : kb_dnf.systems) {
      auto vs = enumerate_vertices(system, nx, cfg.vertex_subset_limit);
      if (!vs) {
        vertex_complete = false;
        continue;
      }
      for (auto& v : *vs) {
        ExactMeasure m(x_space, v);
        if (satisfies(m, kb)) points.push_back(std::move(m));
      }
    }
  }
  for (auto& m : sample_points(kb, cfg.conservative_samples, cfg.seed, cfg)) points.push_back(std::move(m));

  for (const auto& nu : points) {
    ++report.points_tested;
    // Marginal rows: mu(f({x})) = nu(x) for every X-world x.
    std::vector<lp::Row> marginal;
    for (std::size_t x = 0; x < nx; ++x) {
      Point row(nz, Rational(0));
      for (auto z : lift.image(x).worlds()) row[z] = 1;
      marginal.push_back(lp::Row{std::move(row), lp::Sense::kEqual, nu[x]});
    }
    bool extended = false;
    for (const auto& system : psi_dnf.systems) {
      if (solve_cell(system, nz, marginal)) {
        extended = true;
        break;
      }
    }
    if (!extended) {
      report.status = Conservativeness::kNotConservative;
      report.witness = nu;
      report.note = "measure " + to_string(nu) + " satisfies kb but has no extension satisfying kb & psi";
      return report;
    }
  }
  if (vertex_complete) {
    report.status = Conservativeness::kVerified;
    report.note = "every vertex and sampled point of [[kb]] extends";
  } else {
    report.status = Conservativeness::kInconclusive;
    report.note = "vertex enumeration skipped; only sampled points checked";
  }
  return report;
}

}  // namespace repind
