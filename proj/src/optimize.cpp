#include "repind/optimize.hpp"

#include <algorithm>
#include <cmath>

#include "repind/entail.hpp"
#include "repind/error.hpp"

namespace repind {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Row {
  std::vector<double> a;  // over the free worlds only
  double b;
  bool equality;
};

double log_sum_exp(const std::vector<double>& v) {
  double m = -kInf;
  for (double x : v) m = std::max(m, x);
  if (m == -kInf) return m;
  double s = 0;
  for (double x : v) s += std::exp(x - m);
  return m + std::log(s);
}

std::vector<double> softmax(const std::vector<double>& lw) {
  const double z = log_sum_exp(lw);
  std::vector<double> p(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) p[i] = std::exp(lw[i] - z);
  return p;
}

double dot(const std::vector<double>& a, const std::vector<double>& p) {
  double s = 0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * p[i];
  return s;
}

/// Mean and variance of `a` under the tilt of lw by delta.
std::pair<double, double> tilted_moments(const std::vector<double>& lw, const std::vector<double>& a, double delta) {
  std::vector<double> t(lw.size());
  for (std::size_t i = 0; i < lw.size(); ++i) t[i] = lw[i] + delta * a[i];
  auto p = softmax(t);
  double mean = dot(a, p);
  double var = 0;
  for (std::size_t i = 0; i < a.size(); ++i) var += p[i] * (a[i] - mean) * (a[i] - mean);
  return {mean, var};
}

/// delta with E_tilt[a] = b; +-inf when b sits at or beyond the range of a.
double solve_tilt(const std::vector<double>& lw, const std::vector<double>& a, double b, double tol) {
  double amin = kInf, amax = -kInf;
  for (std::size_t i = 0; i < a.size(); ++i) {
    amin = std::min(amin, a[i]);
    amax = std::max(amax, a[i]);
  }
  if (amax - amin <= 1e-15) return 0;
  if (b <= amin) return -kInf;
  if (b >= amax) return kInf;
  auto g = [&](double d) {
    auto [m, v] = tilted_moments(lw, a, d);
    return std::make_pair(m - b, v);
  };
  auto [g0, v0] = g(0);
  if (std::abs(g0) <= tol) return 0;
  double lo, hi;
  if (g0 < 0) {
    lo = 0;
    hi = 1;
    while (g(hi).first < 0) hi *= 2;
  } else {
    hi = 0;
    lo = -1;
    while (g(lo).first > 0) lo *= 2;
  }
  double d = 0, gd = g0, vd = v0;
  for (int it = 0; it < 400; ++it) {
    double next = vd > 0 ? d - gd / vd : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    d = next;
    std::tie(gd, vd) = g(d);
    if (std::abs(gd) <= tol) break;
    if (gd < 0) lo = d;
    else hi = d;
    if (hi - lo <= 1e-15 * std::max(1.0, std::abs(d))) break;
  }
  return d;
}

struct CellOutcome {
  DisjunctDiagnostic diag;
  std::optional<Measure> optimum;
};

CellOutcome project_cell(const Measure& mu, const LinearSystem& system, std::size_t index,
                         const ProjectionConfig& cfg) {
  const auto& space = mu.space();
  const std::size_t n = space->size();
  CellOutcome out;
  out.diag.index = index;

  Event::Bits allowed(n);
  for (std::size_t x = 0; x < n; ++x)
    if (mu[x] > 0) allowed.set(x);
  auto support = cell_support(system, n, allowed);
  if (!support) {
    out.diag.note = satisfiable(space, system).feasible ? "needs mass outside the prior's support" : "empty cell";
    return out;
  }
  std::vector<std::size_t> free;
  for (std::size_t x = 0; x < n; ++x)
    if (support->test(x)) free.push_back(x);

  std::vector<Row> rows;
  auto add = [&](const LinearRow& r, bool eq) {
    Row row{std::vector<double>(free.size()), r.bound.get_d(), eq};
    for (std::size_t i = 0; i < free.size(); ++i) row.a[i] = r.coefficients[free[i]].get_d();
    rows.push_back(std::move(row));
  };
  for (const auto& r : system.equalities) add(r, true);
  for (const auto& r : system.inequalities) add(r, false);
  for (const auto& r : system.strict) add(r, false);

  std::vector<double> lw(free.size());
  for (std::size_t i = 0; i < free.size(); ++i) lw[i] = std::log(mu[free[i]]);
  std::vector<double> lambda(rows.size(), 0.0);
  std::vector<double> p = softmax(lw);

  bool converged = rows.empty();
  std::size_t cycle = 0;
  for (; !converged && cycle < cfg.max_cycles; ++cycle) {
    const std::vector<double> before = p;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const auto& r = rows[j];
      double delta = solve_tilt(lw, r.a, r.b, cfg.root_tol);
      if (!r.equality) delta = std::max(delta, -lambda[j]);
      if (!std::isfinite(delta) || delta == 0) continue;
      lambda[j] += delta;
      for (std::size_t i = 0; i < lw.size(); ++i) lw[i] += delta * r.a[i];
      // Keep the log weights normalised so they stay in range.
      const double z = log_sum_exp(lw);
      for (auto& v : lw) v -= z;
    }
    p = softmax(lw);
    double residual = 0, movement = 0;
    for (std::size_t j = 0; j < rows.size(); ++j) {
      const double s = dot(rows[j].a, p) - rows[j].b;
      if (rows[j].equality || lambda[j] > 0) residual = std::max(residual, std::abs(s));
      else residual = std::max(residual, std::max(0.0, -s));
    }
    for (std::size_t i = 0; i < p.size(); ++i) movement = std::max(movement, std::abs(p[i] - before[i]));
    converged = residual < cfg.residual_tol && movement < cfg.movement_tol;
  }
  if (!converged) throw Error("no convergence");
  out.diag.cycles = cycle;

  std::vector<double> w(n, 0.0);
  for (std::size_t i = 0; i < free.size(); ++i) w[free[i]] = p[i];
  Measure nu = Measure::normalized(space, std::move(w));
  out.diag.finite = true;
  out.diag.divergence = kl_divergence(nu, mu);
  out.diag.strict_ok = true;
  for (const auto& r : system.strict) {
    double s = -r.bound.get_d();
    for (std::size_t x = 0; x < n; ++x) s += r.coefficients[x].get_d() * nu[x];
    if (s < cfg.strict_eps) out.diag.strict_ok = false;
  }
  if (!out.diag.strict_ok) out.diag.note = "closure optimum violates a strict row";
  out.optimum = std::move(nu);
  return out;
}

}  // namespace

std::string to_string(ProjectionStatus s) {
  switch (s) {
    case ProjectionStatus::kAttained: return "attained";
    case ProjectionStatus::kNotAttained: return "not_attained";
    case ProjectionStatus::kEmpty: return "empty";
  }
  return "?";
}

ProjectionResult kl_project(const Measure& mu, const Constraint& kb, const ProjectionConfig& cfg) {
  if (!same_space(mu.space(), kb.space())) throw Error("kl_project: prior and constraint live on different spaces");
  ProjectionResult result;
  if (satisfies(mu, kb, 0.0)) {
    result.status = ProjectionStatus::kAttained;
    result.measures.push_back(mu);
    result.value = 0;
    return result;
  }
  auto dnf = to_dnf(kb, cfg.max_disjuncts);
  std::vector<std::optional<Measure>> optima;
  for (std::size_t i = 0; i < dnf.systems.size(); ++i) {
    auto cell = project_cell(mu, dnf.systems[i], i, cfg);
    result.diagnostics.push_back(cell.diag);
    optima.push_back(std::move(cell.optimum));
  }
  double best = kInf;
  for (const auto& d : result.diagnostics)
    if (d.finite) best = std::min(best, d.divergence);
  if (best == kInf) return result;

  std::vector<Measure> attainers;
  for (std::size_t i = 0; i < optima.size(); ++i) {
    const auto& d = result.diagnostics[i];
    if (d.finite && d.strict_ok && d.divergence <= best + cfg.tie_tol) attainers.push_back(*optima[i]);
  }
  result.value = best;
  if (attainers.empty()) {
    result.status = ProjectionStatus::kNotAttained;
    return result;
  }
  std::sort(attainers.begin(), attainers.end(),
            [](const Measure& a, const Measure& b) { return a.weights() < b.weights(); });
  for (auto& m : attainers)
    if (result.measures.empty() || distance(result.measures.back(), m) > 1e-8) result.measures.push_back(std::move(m));
  result.status = ProjectionStatus::kAttained;
  return result;
}

ProjectionResult maxent(const Constraint& kb, const ProjectionConfig& cfg) {
  auto r = kl_project(Measure::uniform(kb.space()), kb, cfg);
  if (r.status != ProjectionStatus::kEmpty) r.value = std::log2(static_cast<double>(kb.space()->size())) - r.value;
  return r;
}

Measure halfspace_tilt(const Measure& mu, const LinearAtom& atom, double root_tol) {
  const auto& space = mu.space();
  const auto coeffs = atom.coefficients(space);
  double sign = 1;
  bool equality = false;
  switch (atom.comparator) {
    case Comparator::kEqual: equality = true; break;
    case Comparator::kLess:
    case Comparator::kLessEq: sign = -1; break;
    default: break;
  }
  std::vector<std::size_t> supp;
  for (std::size_t x = 0; x < mu.size(); ++x)
    if (mu[x] > 0) supp.push_back(x);
  std::vector<double> a(supp.size()), lw(supp.size());
  for (std::size_t i = 0; i < supp.size(); ++i) {
    a[i] = sign * coeffs[supp[i]].get_d();
    lw[i] = std::log(mu[supp[i]]);
  }
  const double b = sign * atom.bound.get_d();
  const double current = dot(a, softmax(lw));
  if (!equality) {
    const bool strict = atom.comparator == Comparator::kLess || atom.comparator == Comparator::kGreater;
    if (strict ? current > b : current >= b) return mu;
  }
  double amin = kInf, amax = -kInf;
  for (double v : a) {
    amin = std::min(amin, v);
    amax = std::max(amax, v);
  }
  if (b < amin - root_tol || b > amax + root_tol) throw Error("unreachable constraint");
  if (amax - amin <= 1e-15) return mu;
  const double delta = solve_tilt(lw, a, b, root_tol);
  std::vector<double> w(mu.size(), 0.0);
  if (std::isinf(delta)) {
    // Bound at the edge of the range: the limit keeps only the extreme worlds.
    const double edge = delta > 0 ? amax : amin;
    for (std::size_t i = 0; i < supp.size(); ++i)
      if (std::abs(a[i] - edge) <= 1e-15) w[supp[i]] = mu[supp[i]];
    return Measure::normalized(space, std::move(w));
  }
  for (std::size_t i = 0; i < supp.size(); ++i) lw[i] += delta * a[i];
  auto p = softmax(lw);
  for (std::size_t i = 0; i < supp.size(); ++i) w[supp[i]] = p[i];
  return Measure::normalized(space, std::move(w));
}

std::vector<Measure> update_set(const std::vector<Measure>& priors, const Constraint& kb,
                                const ProjectionConfig& cfg, double eps) {
  std::vector<Measure> out;
  for (const auto& mu : priors) {
    auto r = kl_project(mu, kb, cfg);
    if (r.status == ProjectionStatus::kNotAttained)
      throw DomainError("KB outside procedure domain: projection of a prior is not attained");
    for (auto& m : r.measures) {
      bool dup = false;
      for (const auto& have : out) dup = dup || approx_equal(have, m, eps);
      if (!dup) out.push_back(std::move(m));
    }
  }
  std::sort(out.begin(), out.end(), [](const Measure& a, const Measure& b) { return a.weights() < b.weights(); });
  return out;
}

}  // namespace repind
