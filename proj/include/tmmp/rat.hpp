// Exact rational scalar type and parsing/formatting helpers.
#pragma once

#include <boost/multiprecision/gmp.hpp>
#include <stdexcept>
#include <string>

namespace tmmp {

// Arbitrary-precision rational, kept in lowest terms with positive
// denominator by the backend.
using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

inline Int numerOf(const Rat& q) { return boost::multiprecision::numerator(q); }
inline Int denomOf(const Rat& q) { return boost::multiprecision::denominator(q); }

inline bool isInteger(const Rat& q) { return denomOf(q) == 1; }

inline Int floorRat(const Rat& q) {
  Int n = numerOf(q), d = denomOf(q);
  Int f = n / d;
  if (n % d != 0 && n < 0) f -= 1;
  return f;
}

inline Int ceilRat(const Rat& q) { return -floorRat(-q); }

// Fractional part in [0,1).
inline Rat fracRat(const Rat& q) { return q - Rat(floorRat(q)); }

inline Int gcdInt(Int a, Int b) { return boost::multiprecision::gcd(a, b); }
inline Int lcmInt(Int a, Int b) { return boost::multiprecision::lcm(a, b); }

struct ParseError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Signals a bug (broken invariant) rather than bad input.
struct InternalError : std::logic_error {
  using std::logic_error::logic_error;
};

// Accepts "p", "-p", "p/q" with integer p, q (q > 0 after normalization).
inline Rat parseRat(const std::string& s) {
  if (s.empty()) throw ParseError("empty rational literal");
  for (char c : s)
    if (!(std::isdigit(static_cast<unsigned char>(c)) || c == '-' || c == '/' || c == '+'))
      throw ParseError("bad rational literal: " + s);
  try {
    return Rat(s);
  } catch (const std::exception&) {
    throw ParseError("bad rational literal: " + s);
  }
}

inline std::string ratStr(const Rat& q) { return q.str(); }

}  // namespace tmmp
