#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <optional>
#include <string>

namespace rank1lab {

// All set elements, heights and measures are exact. Integer is unbounded;
// Rational is kept canonical (lowest terms, positive denominator).
using Integer = mpz_class;
using Rational = mpq_class;

inline Integer int_abs(const Integer& x) { return abs(x); }

inline Rational make_rational(const Integer& num, const Integer& den) {
    Rational q(num, den);
    q.canonicalize();
    return q;
}

// floor(a / b) for b > 0
inline Integer floor_div(const Integer& a, const Integer& b) {
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline Integer ceil_div(const Integer& a, const Integer& b) {
    Integer q;
    mpz_cdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline std::optional<std::int64_t> to_int64(const Integer& x) {
    if (!x.fits_slong_p()) return std::nullopt;
    return static_cast<std::int64_t>(x.get_si());
}

inline std::string to_string(const Integer& x) { return x.get_str(); }

// "p" for integral values, "p/q" otherwise; always lowest terms
inline std::string to_string(const Rational& q) {
    Rational c(q);
    c.canonicalize();
    if (c.get_den() == 1) return c.get_num().get_str();
    return c.get_num().get_str() + "/" + c.get_den().get_str();
}

}  // namespace rank1lab
