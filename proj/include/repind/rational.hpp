#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace repind {

using Rational = mpq_class;

/// Parses `a`, `a/b`, `-a/b` or a decimal such as `0.125` into an exact
/// rational. Throws ParseError on malformed input.
Rational parse_rational(std::string_view text);

/// Canonical text form: `3/4`, `-2`, `0`.
std::string to_string(const Rational& q);

/// num/den in lowest terms (the two-argument mpq constructor does not reduce).
inline Rational ratio(long num, long den) {
  Rational q(num, den);
  q.canonicalize();
  return q;
}

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace repind
