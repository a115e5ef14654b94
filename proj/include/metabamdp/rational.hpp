#ifndef METABAMDP_RATIONAL_HPP
#define METABAMDP_RATIONAL_HPP

#include <gmpxx.h>

#include <cstdint>
#include <string>
#include <string_view>

namespace mbamdp {

/// Exact rational used for every solver-side value.
using Rational = mpq_class;

inline Rational make_rational(std::int64_t num, std::int64_t den = 1)
{
    Rational r(static_cast<long>(num), static_cast<unsigned long>(den < 0 ? -den : den));
    if (den < 0) r = -r;
    r.canonicalize();
    return r;
}

/// "num/den" (or "num" when the denominator is one).
std::string to_string(const Rational& r);

/// Accepts "a/b", integers and plain decimals such as "0.0125" or "-3e-2" and
/// converts them exactly. Throws std::invalid_argument on malformed input.
Rational parse_rational(std::string_view text);

/// Shortest exact decimal if one exists (denominator of the form 2^a 5^b),
/// otherwise the "num/den" form.
std::string to_exact_decimal_or_fraction(const Rational& r);

inline double to_double(const Rational& r) { return r.get_d(); }

} // namespace mbamdp

#endif
