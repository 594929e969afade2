#pragma once

#include <boost/multiprecision/gmp.hpp>

#include <optional>
#include <stdexcept>
#include <string>

namespace circlelab {

// Exact rational scalar used throughout the certified paths.
using Rat = boost::multiprecision::mpq_rational;
using Int = boost::multiprecision::mpz_int;

inline Int num(const Rat& r) { return numerator(r); }
inline Int den(const Rat& r) { return denominator(r); }

inline Int floor_div(const Int& a, const Int& b) {
    Int q = a / b;
    if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
    return q;
}

inline Int rat_floor(const Rat& r) { return floor_div(num(r), den(r)); }
inline Int rat_ceil(const Rat& r) { return -rat_floor(-r); }

/// Fractional part in [0,1).
inline Rat rat_frac(const Rat& r) { return r - Rat(rat_floor(r)); }

inline int sign(const Rat& r) { return r.sign(); }
inline Rat rat_abs(const Rat& r) { return r < 0 ? Rat(-r) : r; }

struct ParseError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Parses "p/q" or "p" (lowest terms enforced by normalization, q > 0).
/// Decimal literals are rejected: exact contexts take rationals only.
Rat parse_rational(const std::string& text);

std::optional<Rat> try_parse_rational(const std::string& text);

/// Serializes in lowest terms as "p/q", or "p" when the denominator is 1.
std::string format_rational(const Rat& r);

/// Decimal convenience rendering, marked approximate by callers.
double to_double(const Rat& r);

}  // namespace circlelab
