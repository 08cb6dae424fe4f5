#pragma once

#include <gmpxx.h>

#include <cctype>
#include <string>
#include <string_view>

#include "circdyn/errors.hpp"

namespace circdyn {

// GMP keeps mpq_class values canonical (lowest terms, positive denominator)
// as long as every constructor path calls canonicalize().
using Rational = mpq_class;
using Integer = mpz_class;

inline Rational rational(long num, long den = 1)
{
    if (den == 0) throw InvalidInput("rational: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

inline Rational rational(const Integer& num, const Integer& den = 1)
{
    if (den == 0) throw InvalidInput("rational: zero denominator");
    Rational q(num, den);
    q.canonicalize();
    return q;
}

/// Parses "p/q" or "p" (optional leading '-').
inline Rational parse_rational(std::string_view text)
{
    std::string s(text);
    auto bad = [&] { return InvalidInput("not a rational: \"" + s + "\""); };
    if (s.empty()) throw bad();
    auto slash = s.find('/');
    auto valid_int = [](std::string_view part, bool allow_sign) {
        if (part.empty()) return false;
        std::size_t i = 0;
        if (allow_sign && part[0] == '-') i = 1;
        if (i == part.size()) return false;
        for (; i < part.size(); ++i)
            if (!std::isdigit(static_cast<unsigned char>(part[i]))) return false;
        return true;
    };
    std::string_view sv(s);
    std::string_view num = sv.substr(0, slash);
    std::string_view den = slash == std::string::npos ? std::string_view("1") : sv.substr(slash + 1);
    if (!valid_int(num, true) || !valid_int(den, false)) throw bad();
    Integer n(std::string(num), 10), d(std::string(den), 10);
    if (d == 0) throw bad();
    return rational(n, d);
}

/// Always "num/den", even for integers.
inline std::string to_string(const Rational& q)
{
    return q.get_num().get_str() + "/" + q.get_den().get_str();
}

inline Integer floor_int(const Rational& q)
{
    Integer r;
    mpz_fdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

inline Integer ceil_int(const Rational& q)
{
    Integer r;
    mpz_cdiv_q(r.get_mpz_t(), q.get_num_mpz_t(), q.get_den_mpz_t());
    return r;
}

/// x - floor(x), in [0, 1).
inline Rational frac(const Rational& q)
{
    return Rational(q - Rational(floor_int(q)));
}

inline Rational rabs(const Rational& q) { return q < 0 ? Rational(-q) : q; }

inline int sign(const Rational& q) { return sgn(q); }

inline Rational rmin(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational rmax(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// Distance from x to the nearest integer; the flat circle metric of a lift difference.
inline Rational dist_to_integer(const Rational& x)
{
    Rational f = frac(x);
    Rational g = 1 - f;
    return f < g ? f : g;
}

inline Rational pow_rational(const Rational& base, unsigned long exp)
{
    Integer n, d;
    mpz_pow_ui(n.get_mpz_t(), base.get_num_mpz_t(), exp);
    mpz_pow_ui(d.get_mpz_t(), base.get_den_mpz_t(), exp);
    return rational(n, d);
}

inline Integer pow_int(long base, unsigned long exp)
{
    Integer r;
    mpz_ui_pow_ui(r.get_mpz_t(), static_cast<unsigned long>(base < 0 ? -base : base), exp);
    if (base < 0 && (exp % 2 == 1)) r = -r;
    return r;
}

inline double to_double(const Rational& q) { return q.get_d(); }

}  // namespace circdyn
