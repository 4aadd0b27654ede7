#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "revham/patterns.hpp"
#include "revham/reduction.hpp"

#include <random>

using namespace revham;

namespace {

NormalFormResult<Rat> nf_of(const Poly<Rat>& H, const CanonicalModel<Rat>& model, int order)
{
    return birkhoff_normalize(H, order, model);
}

CanonicalModel<Rat> rescaled(CaseTag t)
{
    return time_rescale(canonical_model(t, Rat(1)));
}

/// Independent resultant of two binary quadratics via the 4x4 Sylvester
/// determinant (exact elimination).
Rat sylvester_resultant(const std::array<Rat, 6>& b)
{
    Mat<Rat> S(4, 4);
    S(0, 0) = b[0]; S(0, 1) = b[1]; S(0, 2) = b[2];
    S(1, 1) = b[0]; S(1, 2) = b[1]; S(1, 3) = b[2];
    S(2, 0) = b[3]; S(2, 1) = b[4]; S(2, 2) = b[5];
    S(3, 1) = b[3]; S(3, 2) = b[4]; S(3, 3) = b[5];
    // determinant by char_poly constant term: det = (-1)^n c0
    auto cp = char_poly(S);
    return cp[0]; // n = 4: det(lambda I - S) at lambda=0 -> det(-S) = det(S)
}

} // namespace

TEST_CASE("build_reduced_map: trivial field gives B = sigma S u")
{
    auto model = rescaled(CaseTag::c42);
    auto H = canonical_H2(model.tag, Rat(1));
    auto nf = nf_of(H, model, 4);
    auto rm = build_reduced_map(nf, model, 4);
    CHECK(rm.equivariance_residual == 0);
    CHECK(rm.anti_equivariance_residual == 0);
    // B components: sigma * (S u)_i exactly
    for (int i = 0; i < 4; ++i) {
        TruncContext cx(5);
        Poly<Rat> expect(5);
        for (int j = 0; j < 4; ++j)
            if (!field<Rat>::is_zero(rm.S(i, j)))
                expect += mul(Poly<Rat>::variable(5, 4), Poly<Rat>::variable(5, j), cx).scaled(rm.S(i, j));
        CHECK((rm.B[i] - expect).is_zero());
    }
}

TEST_CASE("4:2 reduced map matches the displayed pattern and restricts to (6.5)")
{
    auto model = rescaled(CaseTag::c42);
    Rat a1 = 1, a2 = 0, a3 = 1;
    auto H = canonical_H2(model.tag, Rat(1)) + patterns::quartic_kernel_42(a1, a2, a3);
    auto nf = nf_of(H, model, 4);
    auto rm = build_reduced_map(nf, model, 4);
    auto g = restrict_to_fix(rm);
    CHECK(g.active_slots == std::vector<int>{0, 2});
    CHECK(g.dropped_slots == std::vector<int>{1, 3});
    CHECK(g.dropped_exact);

    // G_1 = y1 (sigma - a1 y1^2 - a2 y1 y2 - a3 y2^2), same cofactor on y2
    TruncContext cx(5);
    auto y1 = Poly<Rat>::variable(5, 1), y2 = Poly<Rat>::variable(5, 3), sg = Poly<Rat>::variable(5, 4);
    auto Q = mul(y1, y1, cx).scaled(a1) + mul(y1, y2, cx).scaled(a2) + mul(y2, y2, cx).scaled(a3);
    CHECK((g.G[0] - mul(y1, sg - Q, cx)).is_zero());
    CHECK((g.G[1] - mul(y2, sg - Q, cx)).is_zero());

    auto an = analyze_branches(g);
    CHECK(an.verdict == BranchVerdict::families);
    REQUIRE(an.families.size() == 4);
    CHECK(an.coeffs[0] == a1);
    CHECK(an.coeffs[1] == a2);
    CHECK(an.coeffs[2] == a3);
    for (const auto& f : an.families) {
        CHECK(f.law_denom == 1.0);
        CHECK(f.sigma_side == +1);
    }
}

TEST_CASE("4:2 degenerate coefficients yield the outside-U verdict")
{
    auto model = rescaled(CaseTag::c42);
    auto H = canonical_H2(model.tag, Rat(1)) + patterns::quartic_kernel_42(Rat(0), Rat(1), Rat(1));
    auto rm = build_reduced_map(nf_of(H, model, 4), model, 4);
    auto an = analyze_branches(restrict_to_fix(rm));
    CHECK(an.verdict == BranchVerdict::degenerate);
    CHECK(an.families.empty());
}

TEST_CASE("6:2 reduced map: Theorem-B resultant certificate")
{
    auto model = rescaled(CaseTag::c62);
    // kernel cubic with (b1..b6) = (1,0,0,0,0,1): c2 = -1 on y1*pi_a, c4 = +1 on x1*pi_b
    std::array<Rat, 10> c{};
    c[2] = -1;
    c[4] = 1;
    auto H = canonical_H2(model.tag, Rat(1)) + patterns::kernel_cubic_62(c);
    auto nf = nf_of(H, model, 3);
    auto rm = build_reduced_map(nf, model, 3);
    auto g = restrict_to_fix(rm);
    CHECK(g.active_slots == std::vector<int>{0, 1, 3, 5});
    CHECK(g.dropped_slots == std::vector<int>{2, 4});

    auto an = analyze_branches(g);
    CHECK(an.verdict == BranchVerdict::no_branch);
    std::array<Rat, 6> expect{Rat(1), Rat(0), Rat(0), Rat(0), Rat(0), Rat(1)};
    for (int i = 0; i < 6; ++i)
        CHECK(an.forms[i] == expect[i]);
    CHECK(an.resultant == Rat(1));
    CHECK(an.resultant == sylvester_resultant(an.forms));

    // sigma rows: G slots 3 and 5 are -sigma x2, -sigma x3 at this order
    TruncContext cx(7);
    auto x2 = Poly<Rat>::variable(7, 2), x3 = Poly<Rat>::variable(7, 4), sg = Poly<Rat>::variable(7, 6);
    CHECK((g.G[2] + mul(sg, x2, cx)).is_zero());
    CHECK((g.G[3] + mul(sg, x3, cx)).is_zero());
}

TEST_CASE("6:2 zero-resultant data is flagged degenerate, with the Sylvester oracle agreeing")
{
    auto model = rescaled(CaseTag::c62);
    // forms (x2^2, x2^2): common factor
    std::array<Rat, 10> c{};
    c[2] = -1; // b1 = 1
    c[6] = 1;  // b4: x1 * pi_a contributes c6 to slot 2 -> b4 = c6 = 1
    auto H = canonical_H2(model.tag, Rat(1)) + patterns::kernel_cubic_62(c);
    auto rm = build_reduced_map(nf_of(H, model, 3), model, 3);
    auto an = analyze_branches(restrict_to_fix(rm));
    CHECK(an.resultant == Rat(0));
    CHECK(an.resultant == sylvester_resultant(an.forms));
    CHECK(an.verdict == BranchVerdict::degenerate);
}

TEST_CASE("6:4 reduced map: two 2-parameter families with corrected sign law")
{
    auto model = rescaled(CaseTag::c64);
    // a5 = a7 = 1, a6 = 0: kernel quartic coefficients (-1, 0, -1, 0, 0, 0)
    auto H = canonical_H2(model.tag, Rat(1))
           + patterns::kernel_quartic_64<Rat>({Rat(-1), Rat(0), Rat(-1), Rat(0), Rat(0), Rat(0)});
    auto nf = nf_of(H, model, 4);
    auto rm = build_reduced_map(nf, model, 4);
    auto g = restrict_to_fix(rm);
    CHECK(g.active_slots == std::vector<int>{2, 4});
    CHECK(g.dropped_slots == std::vector<int>{0, 1, 3, 5});

    auto an = analyze_branches(g);
    CHECK(an.verdict == BranchVerdict::families);
    REQUIRE(an.families.size() == 4);
    REQUIRE(an.coeffs.size() == 7);
    CHECK(an.coeffs[0] == Rat(0)); // a1
    CHECK(an.coeffs[1] == Rat(0)); // a2
    CHECK(an.coeffs[4] == Rat(1)); // a5
    CHECK(an.coeffs[5] == Rat(0)); // a6
    CHECK(an.coeffs[6] == Rat(1)); // a7
    for (const auto& f : an.families)
        CHECK(f.sigma_side == -1); // a5 = a7 = +1 puts the families on sigma < 0

    // cubic kernel part shifts the factor: with a1 = -p1, a2 = -p0
    auto H2g = canonical_H2(model.tag, Rat(1)) + patterns::kernel_cubic_64(Rat(-2), Rat(3))
             + patterns::kernel_quartic_64<Rat>({Rat(-1), Rat(0), Rat(-1), Rat(0), Rat(0), Rat(0)});
    auto an2 = analyze_branches(restrict_to_fix(build_reduced_map(nf_of(H2g, model, 4), model, 4)));
    CHECK(an2.coeffs[0] == Rat(-3)); // a1 = -cx
    CHECK(an2.coeffs[1] == Rat(2));  // a2 = -cy
}

TEST_CASE("numeric_branch_continue: closed-form law, zero endpoint, perturbation order")
{
    auto model = rescaled(CaseTag::c42);
    Rat a1 = 1, a2 = 0, a3 = 1;
    auto H = canonical_H2(model.tag, Rat(1)) + patterns::quartic_kernel_42(a1, a2, a3);
    auto rm = build_reduced_map(nf_of(H, model, 4), model, 4);
    auto g = restrict_to_fix(rm);
    auto an = analyze_branches(g);
    const auto& fam = an.families[0]; // y1=0, y2 = +sqrt(sigma)

    std::vector<double> grid{1e-2, 1e-3, 1e-4, 0.0};
    auto table = numeric_branch_continue(g, an, fam, grid);
    REQUIRE(table.size() == 4);
    for (size_t i = 0; i + 1 < table.size(); ++i) {
        const auto& p = table[i];
        CHECK(p.converged);
        CHECK(p.residual <= 1e-12);
        CHECK(p.u[1] == 0.0);
        CHECK(std::fabs(p.u[3] - std::sqrt(p.sigma)) <= 1e-12);
    }
    CHECK(table.back().sigma == 0.0);
    for (double v : table.back().u)
        CHECK(v == 0.0);

    // sextic kernel perturbation: refined amplitude differs from sqrt-law by O(sigma^{3/2})
    TruncContext cx(6);
    auto H6 = H + mul(patterns::quartic_kernel_42(Rat(0), Rat(0), Rat(1, 2)),
                      patterns::plane_invariant<Rat>(4, 1), cx);
    auto nfp = birkhoff_normalize(H6, 6, model);
    auto rmp = build_reduced_map(nfp, model, 6);
    auto gp = restrict_to_fix(rmp);
    auto anp = analyze_branches(gp);
    const auto& famp = anp.families[0];
    std::vector<double> grid2{1e-2, 1e-3, 1e-4, 1e-5};
    auto t2 = numeric_branch_continue(gp, anp, famp, grid2);
    for (const auto& p : t2) {
        REQUIRE(p.converged);
        double dev = std::fabs(p.u[3] - std::sqrt(p.sigma));
        CHECK(dev <= 2.0 * std::pow(p.sigma, 1.5));
        CHECK(dev >= 0.01 * std::pow(p.sigma, 1.5));
    }
}

TEST_CASE("scaling law on the refined 4:2 table")
{
    auto model = rescaled(CaseTag::c42);
    auto H = canonical_H2(model.tag, Rat(1)) + patterns::quartic_kernel_42(Rat(2), Rat(0), Rat(3));
    auto rm = build_reduced_map(nf_of(H, model, 4), model, 4);
    auto g = restrict_to_fix(rm);
    auto an = analyze_branches(g);
    // family y1=0: amplitude^2 * a3 - sigma -> 0 faster than sigma
    const auto& fam = an.families[0];
    std::vector<double> grid{1e-2, 1e-3, 1e-4};
    auto table = numeric_branch_continue(g, an, fam, grid);
    for (const auto& p : table) {
        REQUIRE(p.converged);
        double amp2 = p.u[3] * p.u[3];
        CHECK(std::fabs(amp2 * 3.0 - p.sigma) <= 0.5 * p.sigma * p.sigma / 1e-2);
    }
}
