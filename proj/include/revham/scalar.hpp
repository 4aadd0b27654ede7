#pragma once

#include <cmath>
#include <gmpxx.h>
#include <stdexcept>
#include <string>

namespace revham {

/// Exact rational scalar. Arbitrary-precision, always canonical (gcd-reduced,
/// positive denominator) — mpq_class maintains both under arithmetic.
using Rat = mpq_class;

struct scalar_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Uniform interface over the two coefficient fields (exact / double).
template <class K>
struct field;

template <>
struct field<Rat> {
    static constexpr bool exact = true;
    static Rat zero() { return Rat(0); }
    static Rat one() { return Rat(1); }
    static bool is_zero(const Rat& x) { return sgn(x) == 0; }
    static double to_double(const Rat& x) { return x.get_d(); }
    static Rat from_int(long n) { return Rat(n); }
    static Rat from_ratio(long p, long q)
    {
        Rat r(p, q);
        r.canonicalize();
        return r;
    }
    /// Admit anything; exact values need no finiteness screening.
    static void check_admissible(const Rat&) {}
    static std::string str(const Rat& x) { return x.get_str(); }
};

template <>
struct field<double> {
    static constexpr bool exact = false;
    static double zero() { return 0.0; }
    static double one() { return 1.0; }
    static bool is_zero(double x) { return x == 0.0; }
    static double to_double(double x) { return x; }
    static double from_int(long n) { return static_cast<double>(n); }
    static double from_ratio(long p, long q) { return static_cast<double>(p) / static_cast<double>(q); }
    static void check_admissible(double x)
    {
        if (!std::isfinite(x))
            throw scalar_error("non-finite value rejected in float mode");
    }
    static std::string str(double x)
    {
        char buf[32];
        snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }
};

inline Rat rat_from_string(const std::string& s)
{
    Rat r;
    if (r.set_str(s, 10) != 0)
        throw scalar_error("malformed rational literal: " + s);
    r.canonicalize();
    return r;
}

/// If q = (p/r)^2 for some rational p/r, return it via `root` (nonnegative).
inline bool exact_sqrt(const Rat& q, Rat& root)
{
    if (sgn(q) < 0)
        return false;
    if (sgn(q) == 0) {
        root = 0;
        return true;
    }
    mpz_class num = q.get_num(), den = q.get_den();
    if (!mpz_perfect_square_p(num.get_mpz_t()) || !mpz_perfect_square_p(den.get_mpz_t()))
        return false;
    mpz_class rn, rd;
    mpz_sqrt(rn.get_mpz_t(), num.get_mpz_t());
    mpz_sqrt(rd.get_mpz_t(), den.get_mpz_t());
    root = Rat(rn) / Rat(rd);
    return true;
}

} // namespace revham
