#pragma once

#include "revham/canonical.hpp"
#include "revham/poly_vector.hpp"

#include <array>
#include <optional>

namespace revham {

/// Displayed normal-form families for the 4:2 case in canonical coordinates
/// (x1,y1,x2,y2), plus the graded kernel generators used by the 6-dim cases.
/// These are the closed forms the acceptance checks compare against.
namespace patterns {

namespace detail {
template <class K>
Poly<K> V(int n, int i) { return Poly<K>::variable(n, i); }
}

/// Rotation invariants of the canonical double rotation: for n=4 the planes
/// are (x1,y1),(x2,y2); for n=6 they are (x2,y2),(x3,y3).
/// pi_a = r_1^2, pi_b = r_2^2, pi_mix = x_a x_b + y_a y_b, pi_skew = x_a y_b - y_a x_b.
template <class K>
Poly<K> plane_invariant(int n, int which)
{
    using detail::V;
    int base = n == 6 ? 2 : 0;
    TruncContext ctx(2);
    auto xa = V<K>(n, base), ya = V<K>(n, base + 1), xb = V<K>(n, base + 2), yb = V<K>(n, base + 3);
    switch (which) {
    case 0: return mul(xa, xa, ctx) + mul(ya, ya, ctx);
    case 1: return mul(xb, xb, ctx) + mul(yb, yb, ctx);
    case 2: return mul(xa, xb, ctx) + mul(ya, yb, ctx);
    case 3: return mul(xa, yb, ctx) - mul(ya, xb, ctx);
    }
    throw poly_error("plane_invariant: bad selector");
}

/// The three-parameter quartic kernel of Ad_{H2} in the 4:2 case:
/// (a1 pi_a + a2 pi_mix + a3 pi_b) * (x1 y2 - y1 x2). Its Hamiltonian field
/// is the cubic family displayed in the paper's two-degrees-of-freedom normal
/// form, with the same (a1,a2,a3).
template <class K>
Poly<K> quartic_kernel_42(const K& a1, const K& a2, const K& a3)
{
    TruncContext ctx(4);
    auto s = plane_invariant<K>(4, 0).scaled(a1) + plane_invariant<K>(4, 2).scaled(a2)
           + plane_invariant<K>(4, 1).scaled(a3);
    return mul(s, plane_invariant<K>(4, 3), ctx);
}

/// The displayed cubic Birkhoff field for the 4:2 case (three parameters).
template <class K>
PolyVector<K> eq63_field(const K& a1, const K& a2, const K& a3)
{
    using detail::V;
    int n = 4;
    TruncContext ctx(3);
    auto x1 = V<K>(n, 0), y1 = V<K>(n, 1), x2 = V<K>(n, 2), y2 = V<K>(n, 3);
    auto P1 = plane_invariant<K>(4, 0);
    auto P2 = plane_invariant<K>(4, 1);
    auto P3 = plane_invariant<K>(4, 2);
    auto sw = mul(x2, y1, ctx) - mul(x1, y2, ctx); // x2 y1 - x1 y2
    auto Q = P1.scaled(a1) + P3.scaled(a2) + P2.scaled(a3);

    PolyVector<K> f(n, n);
    f[0] = mul(y1, P1, ctx).scaled(a1)
         + (mul(mul(x1, x2, ctx), y1, ctx).scaled(field<K>::from_int(2))
            - mul(mul(x1, x1, ctx), y2, ctx) + mul(mul(y1, y1, ctx), y2, ctx)).scaled(a2)
         + (mul(mul(x2, x2, ctx), y1, ctx).scaled(field<K>::from_int(3))
            - mul(mul(x1, x2, ctx), y2, ctx).scaled(field<K>::from_int(2))
            + mul(y1, mul(y2, y2, ctx), ctx)).scaled(a3);
    f[1] = mul(y1.scaled(a2) + y2.scaled(a3 + a3), sw, ctx) - mul(x1, Q, ctx);
    f[2] = mul(x1.scaled(a1 + a1) + x2.scaled(a2), -sw, ctx) + mul(y2, Q, ctx);
    f[3] = mul(y1.scaled(a1 + a1) + y2.scaled(a2), -sw, ctx) - mul(x2, Q, ctx);
    return f;
}

/// Read (a1,a2,a3) off a cubic 4-dim field and verify it equals the family
/// member exactly; nullopt when the field is outside the family.
template <class K>
std::optional<std::array<K, 3>> extract_eq63(const PolyVector<K>& f)
{
    if (f.size() != 4 || f.vars() != 4)
        return std::nullopt;
    auto coeff = [&](int comp, int e0, int e1, int e2, int e3) {
        Monomial m(4);
        m.e[0] = e0; m.e[1] = e1; m.e[2] = e2; m.e[3] = e3;
        return f[comp].coefficient(m);
    };
    K a1 = coeff(0, 2, 1, 0, 0);                       // x1^2 y1
    K a2 = coeff(0, 0, 2, 0, 1);                       // y1^2 y2
    K a3 = coeff(0, 0, 1, 0, 2);                       // y1 y2^2
    auto rebuilt = eq63_field(a1, a2, a3);
    auto diff = rebuilt - f;
    bool match = field<K>::exact ? diff.is_zero() : max_coeff_abs(diff) <= 1e-9 * std::max(1.0, max_coeff_abs(f));
    if (!match)
        return std::nullopt;
    return std::array<K, 3>{a1, a2, a3};
}

/// The displayed 12-parameter reversible Belitskii cubic family (4:2 case).
/// Order: e21, e23, e30, e16, e24, e26, d15, d22, d20, d29, d17, d25.
template <class K>
PolyVector<K> eq62_field(const std::array<K, 12>& c)
{
    using detail::V;
    int n = 4;
    TruncContext ctx(3);
    auto x1 = V<K>(n, 0), y1 = V<K>(n, 1), x2 = V<K>(n, 2), y2 = V<K>(n, 3);
    auto P1 = plane_invariant<K>(4, 0);
    auto P2 = plane_invariant<K>(4, 1);
    auto P3 = plane_invariant<K>(4, 2);
    auto P4 = mul(y1, x2, ctx) - mul(x1, y2, ctx); // y1 x2 - x1 y2
    const K &e21 = c[0], &e23 = c[1], &e30 = c[2], &e16 = c[3], &e24 = c[4], &e26 = c[5];
    const K &d15 = c[6], &d22 = c[7], &d20 = c[8], &d29 = c[9], &d17 = c[10], &d25 = c[11];

    PolyVector<K> f(n, n);
    f[0] = mul(y1.scaled(e21) + y2.scaled(e23), P1, ctx) + mul(y2, P2, ctx).scaled(e30)
         + mul(x1.scaled(e16) + x2.scaled(e24), P4, ctx) + mul(y2, P3, ctx).scaled(e26);
    f[1] = mul(x1.scaled(-e21) - x2.scaled(e23), P1, ctx) - mul(x2, P2, ctx).scaled(e30)
         + mul(y1.scaled(e16) + y2.scaled(e24), P4, ctx) - mul(x2, P3, ctx).scaled(e26);
    f[2] = mul(y1.scaled(-d15) - y2.scaled(d22), P1, ctx) - mul(y1.scaled(d20) + y2.scaled(d29), P2, ctx)
         - mul(y1.scaled(d17) + y2.scaled(d25), P3, ctx);
    f[3] = mul(x1.scaled(d15) + x2.scaled(d22), P1, ctx) + mul(x1.scaled(d20) + x2.scaled(d29), P2, ctx)
         + mul(x1.scaled(d17) + x2.scaled(d25), P3, ctx);
    return f;
}

template <class K>
std::optional<std::array<K, 12>> extract_eq62(const PolyVector<K>& f)
{
    if (f.size() != 4 || f.vars() != 4)
        return std::nullopt;
    auto coeff = [&](int comp, int e0, int e1, int e2, int e3) {
        Monomial m(4);
        m.e[0] = e0; m.e[1] = e1; m.e[2] = e2; m.e[3] = e3;
        return f[comp].coefficient(m);
    };
    std::array<K, 12> c{
        coeff(0, 2, 1, 0, 0),     // e21: x1^2 y1
        coeff(0, 0, 2, 0, 1),     // e23: y1^2 y2
        coeff(0, 0, 0, 2, 1),     // e30: x2^2 y2
        coeff(0, 1, 1, 1, 0),     // e16: x1 y1 x2
        coeff(0, 0, 1, 2, 0),     // e24: x2^2 y1
        coeff(0, 0, 1, 0, 2),     // e26: y1 y2^2
        K(-coeff(2, 2, 1, 0, 0)), // d15: -x1^2 y1
        K(-coeff(2, 2, 0, 0, 1)), // d22: -x1^2 y2
        K(-coeff(2, 0, 1, 2, 0)), // d20: -x2^2 y1
        K(-coeff(2, 0, 0, 2, 1)), // d29: -x2^2 y2
        K(-coeff(2, 1, 1, 1, 0)), // d17: -x1 x2 y1
        K(-coeff(2, 1, 0, 1, 1)), // d25: -x1 x2 y2
    };
    auto rebuilt = eq62_field(c);
    auto diff = rebuilt - f;
    bool match = field<K>::exact ? diff.is_zero() : max_coeff_abs(diff) <= 1e-9 * std::max(1.0, max_coeff_abs(f));
    if (!match)
        return std::nullopt;
    return c;
}

/// Kernel cubics for n=6 (shared A-hat): multiples of the kernel-plane
/// coordinates. For 6:2 (anti-invariant under Rhat1) the ten generators are
/// {y1,x1} x {pi_b, pi_mix, pi_a} plus the four (x1,y1)-only cubics;
/// for 6:4 the two generators are {y1, x1} * pi_skew.
template <class K>
Poly<K> kernel_cubic_62(const std::array<K, 10>& c)
{
    using detail::V;
    int n = 6;
    TruncContext ctx(3);
    auto x1 = V<K>(n, 0), y1 = V<K>(n, 1);
    auto pa = plane_invariant<K>(6, 0), pb = plane_invariant<K>(6, 1), pm = plane_invariant<K>(6, 2);
    Poly<K> H(n);
    H += mul(y1, pb, ctx).scaled(c[0]) + mul(y1, pm, ctx).scaled(c[1]) + mul(y1, pa, ctx).scaled(c[2]);
    H += pow(y1, 3, ctx).scaled(c[3]);
    H += mul(x1, pb, ctx).scaled(c[4]) + mul(x1, pm, ctx).scaled(c[5]) + mul(x1, pa, ctx).scaled(c[6]);
    H += mul(x1, mul(y1, y1, ctx), ctx).scaled(c[7]);
    H += mul(mul(x1, x1, ctx), y1, ctx).scaled(c[8]);
    H += pow(x1, 3, ctx).scaled(c[9]);
    return H;
}

template <class K>
Poly<K> kernel_cubic_64(const K& cy, const K& cx)
{
    using detail::V;
    TruncContext ctx(3);
    auto skew = plane_invariant<K>(6, 3);
    return mul(V<K>(6, 1).scaled(cy) + V<K>(6, 0).scaled(cx), skew, ctx);
}

/// Kernel quartics for 6:4: pi_skew times the six even invariants
/// {pi_b, pi_mix, pi_a, y1^2, x1 y1, x1^2}.
template <class K>
Poly<K> kernel_quartic_64(const std::array<K, 6>& q)
{
    using detail::V;
    int n = 6;
    TruncContext ctx(4);
    auto x1 = V<K>(n, 0), y1 = V<K>(n, 1);
    auto skew = plane_invariant<K>(6, 3);
    Poly<K> s(n);
    s += plane_invariant<K>(6, 1).scaled(q[0]) + plane_invariant<K>(6, 2).scaled(q[1])
       + plane_invariant<K>(6, 0).scaled(q[2]);
    s += mul(y1, y1, ctx).scaled(q[3]) + mul(x1, y1, ctx).scaled(q[4]) + mul(x1, x1, ctx).scaled(q[5]);
    return mul(s, skew, ctx);
}

} // namespace patterns
} // namespace revham
