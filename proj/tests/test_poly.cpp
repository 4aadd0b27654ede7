#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "revham/hamilton.hpp"
#include "revham/poly.hpp"
#include "revham/poly_vector.hpp"

#include <random>

using namespace revham;

namespace {

Poly<Rat> var(int dim, int i) { return Poly<Rat>::variable(dim, i); }

Poly<Rat> random_poly(std::mt19937& rng, int dim, int deg, int terms)
{
    std::uniform_int_distribution<int> num(-6, 6), den(1, 4), expo(0, deg);
    Poly<Rat> p(dim);
    while (static_cast<int>(p.term_count()) < terms) {
        Monomial m(dim);
        int total = 0;
        for (int i = 0; i < dim; ++i) {
            int e = expo(rng);
            if (total + e > deg)
                e = 0;
            m.e[i] = static_cast<uint8_t>(e);
            total += e;
        }
        int n = num(rng);
        if (n == 0)
            continue;
        p.add_term(m, field<Rat>::from_ratio(n, den(rng)));
    }
    return p;
}

Poly<Rat> random_homogeneous(std::mt19937& rng, int dim, int deg)
{
    std::uniform_int_distribution<int> num(-5, 5), den(1, 3);
    Poly<Rat> p(dim);
    for (const auto& m : monomial_basis(dim, deg)) {
        int n = num(rng);
        if (n != 0)
            p.add_term(m, field<Rat>::from_ratio(n, den(rng)));
    }
    return p;
}

Mat<Rat> standard_J(int n)
{
    Mat<Rat> J(n, n);
    for (int k = 0; k < n / 2; ++k) {
        J(2 * k, 2 * k + 1) = 1;
        J(2 * k + 1, 2 * k) = -1;
    }
    return J;
}

} // namespace

TEST_CASE("product and difference of squares")
{
    TruncContext ctx(8);
    int n = 4;
    auto f = var(n, 0) + var(n, 1);
    auto g = var(n, 0) - var(n, 1);
    auto expect = mul(var(n, 0), var(n, 0), ctx) - mul(var(n, 1), var(n, 1), ctx);
    CHECK((mul(f, g, ctx) - expect).is_zero());
}

TEST_CASE("partial derivative power rule")
{
    TruncContext ctx(8);
    int n = 4;
    auto f = mul(mul(var(n, 0), var(n, 0), ctx), var(n, 1), ctx); // x1^2 y1
    auto d = partial(f, 0);
    auto expect = mul(var(n, 0), var(n, 1), ctx).scaled(Rat(2));
    CHECK((d - expect).is_zero());
}

TEST_CASE("multiplication truncates at context order and records it")
{
    TruncContext ctx(4);
    int n = 4;
    auto f = mul(var(n, 0), var(n, 0), ctx); // x1^2
    auto g = pow(var(n, 3), 3, ctx);         // y2^3
    CHECK_FALSE(ctx.truncated);
    auto h = mul(f, g, ctx); // degree 5 > 4
    CHECK(h.is_zero());
    CHECK(ctx.truncated);
}

TEST_CASE("grade selects homogeneous parts and their sum recovers f")
{
    TruncContext ctx(8);
    int n = 4;
    auto f = var(n, 0) + mul(mul(var(n, 0), var(n, 0), ctx), var(n, 1), ctx);
    CHECK((grade(f, 3) - mul(mul(var(n, 0), var(n, 0), ctx), var(n, 1), ctx)).is_zero());
    CHECK(grade(f, 2).is_zero());

    std::mt19937 rng(11);
    auto p = random_poly(rng, 4, 4, 20);
    Poly<Rat> sum(4);
    for (int d = 0; d <= 4; ++d)
        sum += grade(p, d);
    CHECK((sum - p).is_zero());
}

TEST_CASE("substitute_linear basics")
{
    TruncContext ctx(8);
    int n = 4;
    std::mt19937 rng(5);
    auto f = random_poly(rng, n, 4, 12);
    auto id = Mat<Rat>::identity(n).row_major();
    CHECK((substitute_linear(f, id, ctx) - f).is_zero());

    auto g = mul(var(n, 0), var(n, 0), ctx);
    auto D = Mat<Rat>::diag({Rat(2), Rat(1), Rat(1), Rat(1)}).row_major();
    CHECK((substitute_linear(g, D, ctx) - g.scaled(Rat(4))).is_zero());

    // H = x1 y2 is invariant under Rhat0 = diag(-1,1,-1,1): term-by-term the
    // sign picked up is (-1)^(e1+e3), here (-1)^1 from x1 times nothing... the
    // oracle: recompute by flipping signs of odd-exponent variables directly.
    auto H = mul(var(n, 0), var(n, 3), ctx);
    auto R = Mat<Rat>::diag({Rat(-1), Rat(1), Rat(-1), Rat(1)});
    auto HR = substitute_linear(H, R.row_major(), ctx);
    Poly<Rat> oracle(n);
    for (const auto& [m, c] : H.terms()) {
        int s = 1;
        for (int i = 0; i < n; ++i)
            if (field<Rat>::to_double(R(i, i)) < 0 && (m.e[i] & 1))
                s = -s;
        oracle.add_term(m, s < 0 ? Rat(-c) : c);
    }
    CHECK((HR - oracle).is_zero());
    CHECK((HR + H).is_zero()); // x1*y2 o Rhat0 = -x1*y2: anti-invariant
}

TEST_CASE("substitute_linear round-trips through M and M^{-1}")
{
    TruncContext ctx(6);
    std::mt19937 rng(17);
    Mat<Rat> M(4, 4);
    std::uniform_int_distribution<int> num(-3, 3);
    do {
        for (int i = 0; i < 4; ++i)
            for (int j = 0; j < 4; ++j)
                M(i, j) = Rat(num(rng));
    } while (rank(M) < 4);
    auto f = random_poly(rng, 4, 4, 15);
    auto g = substitute_linear(substitute_linear(f, M.row_major(), ctx), inverse(M).row_major(), ctx);
    CHECK((g - f).is_zero());
}

TEST_CASE("poisson bracket: canonical pairs, antisymmetry, Jacobi, grading")
{
    int n = 4;
    TruncContext ctx(10);
    auto J = standard_J(n);

    // {x1,y1} = 1, via the definition omega(X_{x1}, X_{y1}) as the oracle
    auto bx = poisson_bracket(var(n, 0), var(n, 1), J, ctx);
    CHECK((bx - Poly<Rat>::constant(n, Rat(1))).is_zero());
    {
        auto Xf = hamiltonian_vector_field(var(n, 0), J);
        auto Xg = hamiltonian_vector_field(var(n, 1), J);
        // omega(u,v) = u^T J v with the standard structure
        Poly<Rat> omega(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (!field<Rat>::is_zero(J(i, j)))
                    omega += mul(Xf[i], Xg[j], ctx).scaled(J(i, j));
        CHECK((omega - bx).is_zero());
    }

    std::mt19937 rng(23);
    auto H2 = random_homogeneous(rng, n, 2);
    CHECK(poisson_bracket(H2, H2, J, ctx).is_zero());

    auto f = random_homogeneous(rng, n, 3);
    auto g = random_homogeneous(rng, n, 3);
    auto h = random_homogeneous(rng, n, 3);
    CHECK((poisson_bracket(f, g, J, ctx) + poisson_bracket(g, f, J, ctx)).is_zero());

    auto jac = poisson_bracket(f, poisson_bracket(g, h, J, ctx), J, ctx)
             + poisson_bracket(g, poisson_bracket(h, f, J, ctx), J, ctx)
             + poisson_bracket(h, poisson_bracket(f, g, J, ctx), J, ctx);
    CHECK(jac.is_zero());

    auto fg = poisson_bracket(f, g, J, ctx);
    if (!fg.is_zero()) {
        CHECK(fg.degree() == 4);
        CHECK((grade(fg, 4) - fg).is_zero());
    }
}

TEST_CASE("hamiltonian vector field: linear part and first-integral identity")
{
    int n = 4;
    TruncContext ctx(10);
    auto J = standard_J(n);

    CHECK(hamiltonian_vector_field(Poly<Rat>(n), J).is_zero());

    // canonical 4:2 H2 in canonical coordinates, with canonical structure
    Mat<Rat> Khat(n, n);
    Khat(0, 2) = -1; Khat(1, 3) = -1; Khat(2, 0) = 1; Khat(3, 1) = 1;
    auto W = poisson_operator(Khat);
    CHECK(W == Khat); // Khat^2 = -Id
    auto H2 = mul(var(n, 0), var(n, 3), ctx) - mul(var(n, 1), var(n, 2), ctx);
    auto X = hamiltonian_vector_field(H2, W);
    Mat<Rat> Ahat(n, n);
    Ahat(0, 1) = 1; Ahat(1, 0) = -1; Ahat(2, 3) = 1; Ahat(3, 2) = -1;
    CHECK(linear_part(X) == Ahat);
    CHECK((X - linear_field(Ahat)).is_zero());

    // grad H . (W grad H) = {H,H} = 0 for a full jet
    std::mt19937 rng(3);
    auto H = random_poly(rng, n, 4, 18);
    auto XH = hamiltonian_vector_field(H, J);
    Poly<Rat> dHX(n);
    for (int i = 0; i < n; ++i)
        dHX += mul(partial(H, i), XH[i], ctx);
    CHECK(dHX.is_zero());
}

TEST_CASE("6:2 paper Hamiltonian reproduces the displayed linear part")
{
    // H built from the display labels: H_{y1} = a x2 + b y2 + c x3 + d y3,
    // H_{x1} = -(e x2 + f y2 + g x3 + h y3).
    int n = 6;
    TruncContext ctx(6);
    auto J = standard_J(n);
    Rat a = 2, b = -1, c = 3, d = 1, e = -2, f = 5, g = 1, h = -3;
    auto H = mul(var(n, 1), var(n, 2).scaled(a) + var(n, 3).scaled(b) + var(n, 4).scaled(c) + var(n, 5).scaled(d), ctx)
           - mul(var(n, 0), var(n, 2).scaled(e) + var(n, 3).scaled(f) + var(n, 4).scaled(g) + var(n, 5).scaled(h), ctx);
    auto X = hamiltonian_vector_field(H, J);
    Mat<Rat> A1(n, n);
    A1(0, 2) = a; A1(0, 3) = b; A1(0, 4) = c; A1(0, 5) = d;
    A1(1, 2) = e; A1(1, 3) = f; A1(1, 4) = g; A1(1, 5) = h;
    A1(2, 0) = -f; A1(2, 1) = b;
    A1(3, 0) = e;  A1(3, 1) = -a;
    A1(4, 0) = -h; A1(4, 1) = d;
    A1(5, 0) = g;  A1(5, 1) = -c;
    CHECK(linear_part(X) == A1);
}

TEST_CASE("exact mode determinism and canonical text form")
{
    std::mt19937 rng1(99), rng2(99);
    auto p1 = random_poly(rng1, 6, 4, 25);
    auto p2 = random_poly(rng2, 6, 4, 25);
    CHECK(to_string(p1) == to_string(p2));

    TruncContext ctx(6);
    auto q = mul(var(4, 0) + var(4, 1), var(4, 0) - var(4, 1), ctx);
    CHECK(to_string(q) == "x1^2 - y1^2");
}

TEST_CASE("float mode rejects non-finite coefficients")
{
    Poly<double> p(4);
    Monomial m(4);
    m.e[0] = 1;
    CHECK_THROWS_AS(p.add_term(m, std::numeric_limits<double>::infinity()), scalar_error);
    CHECK_THROWS_AS(p.add_term(m, std::numeric_limits<double>::quiet_NaN()), scalar_error);
}

TEST_CASE("lie bracket and belitskii defect vanish for commuting data")
{
    TruncContext ctx(8);
    Mat<Rat> Ahat(4, 4);
    Ahat(0, 1) = 1; Ahat(1, 0) = -1; Ahat(2, 3) = 1; Ahat(3, 2) = -1;
    auto lin = linear_field(Ahat);
    CHECK(lie_bracket(lin, lin, ctx).is_zero());
    // linear field: zero nonlinear part trivially satisfies the identity
    PolyVector<Rat> zero(4, 4);
    CHECK(belitskii_defect(zero, Ahat, ctx).is_zero());
}
