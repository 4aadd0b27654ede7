#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace revham {

/// Exponent vector of a monomial in up to `max_vars` phase variables.
/// Phase spaces here are R^4 and R^6, ordered (x1,y1,x2,y2[,x3,y3]);
/// the reduced bifurcation map adds a trailing parameter slot (sigma).
struct Monomial {
    static constexpr int max_vars = 8;
    std::array<uint8_t, max_vars> e{};
    uint8_t dim = 0;

    explicit Monomial(int n = 0) : dim(static_cast<uint8_t>(n)) {}

    int degree() const
    {
        int d = 0;
        for (int i = 0; i < dim; ++i)
            d += e[i];
        return d;
    }

    bool operator==(const Monomial& o) const { return dim == o.dim && e == o.e; }
};

/// Graded-lexicographic order: by total degree, then earlier variables with
/// higher exponents first. Fixed once so serialized polynomials diff stably.
struct GrlexLess {
    bool operator()(const Monomial& a, const Monomial& b) const
    {
        int da = a.degree(), db = b.degree();
        if (da != db)
            return da < db;
        for (int i = 0; i < a.dim && i < b.dim; ++i)
            if (a.e[i] != b.e[i])
                return a.e[i] > b.e[i];
        return false;
    }
};

/// Canonical variable names: x1,y1,...,xk,yk and "sigma" for an odd trailing slot.
inline std::string variable_name(int i, int dim)
{
    if (dim % 2 == 1 && i == dim - 1)
        return "sigma";
    std::string base = (i % 2 == 0) ? "x" : "y";
    return base + std::to_string(i / 2 + 1);
}

inline std::string to_string(const Monomial& m)
{
    std::string s;
    for (int i = 0; i < m.dim; ++i) {
        if (m.e[i] == 0)
            continue;
        if (!s.empty())
            s += "*";
        s += variable_name(i, m.dim);
        if (m.e[i] > 1)
            s += "^" + std::to_string(m.e[i]);
    }
    return s.empty() ? "1" : s;
}

/// All degree-d monomials in n variables, grlex order.
inline std::vector<Monomial> monomial_basis(int n, int d)
{
    std::vector<Monomial> out;
    Monomial m(n);
    auto rec = [&](auto&& self, int i, int rem) -> void {
        if (i == n - 1) {
            m.e[i] = static_cast<uint8_t>(rem);
            out.push_back(m);
            return;
        }
        for (int k = rem; k >= 0; --k) { // higher exponent on earlier variable first
            m.e[i] = static_cast<uint8_t>(k);
            self(self, i + 1, rem - k);
        }
        m.e[i] = 0;
    };
    if (n > 0)
        rec(rec, 0, d);
    return out;
}

/// Sign of m under a diagonal involution diag(signs): product of signs^e.
inline int monomial_parity(const Monomial& m, const std::vector<int>& signs)
{
    int s = 1;
    for (int i = 0; i < m.dim; ++i)
        if (signs[i] < 0 && (m.e[i] & 1))
            s = -s;
    return s;
}

} // namespace revham
