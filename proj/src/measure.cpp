#include "repind/measure.hpp"

#include <algorithm>
#include <iomanip>
#include <limits>
#include <sstream>

namespace repind {

Measure to_float(const ExactMeasure& m) {
  std::vector<double> w;
  w.reserve(m.size());
  for (const auto& q : m.weights()) w.push_back(q.get_d());
  return Measure::normalized(m.space(), std::move(w));
}

ExactMeasure to_exact(const Measure& m) {
  std::vector<Rational> w;
  w.reserve(m.size());
  for (double d : m.weights()) w.emplace_back(d);
  return ExactMeasure::normalized(m.space(), std::move(w));
}

double distance(const Measure& a, const Measure& b) {
  if (!same_space(a.space(), b.space())) throw Error("distance between measures on different spaces");
  double d = 0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

bool approx_equal(const Measure& a, const Measure& b, double eps) { return distance(a, b) <= eps; }

double entropy(const Measure& mu) {
  double h = 0;
  for (double p : mu.weights())
    if (p > 0) h -= p * std::log2(p);
  return std::max(h, 0.0);
}

double kl_divergence(const Measure& mu_prime, const Measure& mu) {
  if (!same_space(mu_prime.space(), mu.space())) throw Error("kl_divergence: different spaces");
  double d = 0;
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double p = mu_prime[i], q = mu[i];
    if (p <= 0) continue;
    if (q <= 0) return std::numeric_limits<double>::infinity();
    d += p * std::log2(p / q);
  }
  return std::max(d, 0.0);
}

bool corresponds(const Embedding& f, const ExactMeasure& mu, const ExactMeasure& nu) {
  if (!same_space(mu.space(), f.source())) throw Error("corresponds: mu is not on the embedding's source");
  return pushforward(f, nu) == mu;
}

bool corresponds(const Embedding& f, const Measure& mu, const Measure& nu, double eps) {
  if (!same_space(mu.space(), f.source())) throw Error("corresponds: mu is not on the embedding's source");
  return approx_equal(pushforward(f, nu), mu, eps);
}

bool is_product_measure(const ExactMeasure& mu) {
  auto d = decompose(mu.space());
  if (d.factors.size() < 2) return true;
  auto parts = marginals(mu, d);
  for (std::size_t x = 0; x < mu.size(); ++x) {
    Rational p = 1;
    for (std::size_t i = 0; i < parts.size(); ++i) p *= parts[i][d.coordinates[x][i]];
    if (p != mu[x]) return false;
  }
  return true;
}

bool is_product_measure(const Measure& mu, double eps) {
  auto d = decompose(mu.space());
  if (d.factors.size() < 2) return true;
  auto parts = marginals(mu, d);
  for (std::size_t x = 0; x < mu.size(); ++x) {
    double p = 1;
    for (std::size_t i = 0; i < parts.size(); ++i) p *= parts[i][d.coordinates[x][i]];
    if (std::abs(p - mu[x]) > eps) return false;
  }
  return true;
}

Event iff_event(const SpacePtr& product, const Event& s0, const Event& s1) {
  if (product->factors().size() != 2) throw Error("iff_event needs a two-factor product");
  Event::Bits b(product->size());
  for (std::size_t w = 0; w < product->size(); ++w)
    if (s0.contains(product->factor_coordinate(w, 0)) == s1.contains(product->factor_coordinate(w, 1))) b.set(w);
  return Event(product, std::move(b));
}

ExactMeasure couple(const ExactMeasure& mu0, const Event& s0, const ExactMeasure& mu1, const Event& s1) {
  if (!same_space(mu0.space(), s0.space()) || !same_space(mu1.space(), s1.space()))
    throw Error("couple: events and measures on different spaces");
  const Rational m0 = mu0.prob(s0), m1 = mu1.prob(s1);
  if (m0 != m1) throw Error("couple: mu0(s0) = " + to_string(m0) + " differs from mu1(s1) = " + to_string(m1));
  auto product = product_space({mu0.space(), mu1.space()});
  const Rational m1_out = 1 - m1;
  std::vector<Rational> w(product->size(), Rational(0));
  for (std::size_t z = 0; z < product->size(); ++z) {
    const auto a = product->factor_coordinate(z, 0), b = product->factor_coordinate(z, 1);
    const bool in0 = s0.contains(a), in1 = s1.contains(b);
    // Terms with a zero denominator drop out.
    if (in0 && in1 && m1 != 0) w[z] = mu0[a] * mu1[b] / m1;
    else if (!in0 && !in1 && m1_out != 0) w[z] = mu0[a] * mu1[b] / m1_out;
  }
  return ExactMeasure(product, std::move(w));
}

double kl_chain_identity_residual(const Measure& nu2, const Measure& nu, const Embedding& f) {
  const double lhs = kl_divergence(nu2, nu);
  const auto mu2 = pushforward(f, nu2);
  const auto mu = pushforward(f, nu);
  double rhs = kl_divergence(mu2, mu);
  for (std::size_t x = 0; x < f.source()->size() && std::isfinite(rhs); ++x) {
    const Event& fiber = f.image(x);
    const double mass2 = nu2.prob(fiber);
    if (mass2 <= 0) continue;
    const double mass = nu.prob(fiber);
    if (mass <= 0) {
      rhs = std::numeric_limits<double>::infinity();
      break;
    }
    double term = 0;
    for (auto y : fiber.worlds()) {
      const double p = nu2[y] / mass2, q = nu[y] / mass;
      if (p <= 0) continue;
      if (q <= 0) {
        term = std::numeric_limits<double>::infinity();
        break;
      }
      term += p * std::log2(p / q);
    }
    rhs += mass2 * term;
  }
  if (std::isinf(lhs) && std::isinf(rhs)) return 0.0;
  if (std::isinf(lhs) || std::isinf(rhs)) return std::numeric_limits<double>::infinity();
  return std::abs(lhs - rhs);
}

std::string to_string(const Measure& mu, int precision) {
  std::ostringstream os;
  os << std::setprecision(precision) << "(";
  for (std::size_t i = 0; i < mu.size(); ++i) os << (i ? ", " : "") << mu[i];
  os << ")";
  return os.str();
}

std::string to_string(const ExactMeasure& mu) {
  std::string s = "(";
  for (std::size_t i = 0; i < mu.size(); ++i) s += (i ? ", " : "") + to_string(mu[i]);
  return s + ")";
}

Measure random_measure(const SpacePtr& space, std::mt19937_64& rng, double concentration) {
  std::gamma_distribution<double> gamma(concentration, 1.0);
  std::vector<double> w(space->size());
  double total = 0;
  while (!(total > 0)) {
    total = 0;
    for (auto& v : w) total += (v = gamma(rng));
  }
  return Measure::normalized(space, std::move(w));
}

ExactMeasure random_exact_measure(const SpacePtr& space, std::mt19937_64& rng, int max_weight) {
  std::uniform_int_distribution<int> pick(0, max_weight);
  std::vector<Rational> w(space->size());
  Rational total = 0;
  while (total == 0) {
    total = 0;
    for (auto& v : w) total += (v = pick(rng));
  }
  return ExactMeasure::normalized(space, std::move(w));
}

}  // namespace repind
