#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "revham/patterns.hpp"
#include "revham/shooting.hpp"

#include <cmath>
#include <random>

using namespace revham;

namespace {

/// Canonical 4:2 demo field: H = H2 + (a1 pi_a + a3 pi_b) * skew with
/// (a1,a2,a3) = (1,0,1).
PolyVector<double> demo42_field()
{
    auto model = canonical_model(CaseTag::c42, Rat(1));
    auto H = canonical_H2(model.tag, Rat(1)) + patterns::quartic_kernel_42(Rat(1), Rat(0), Rat(1));
    return to_double_field(hamiltonian_vector_field(H, model.Jop));
}

Poly<double> demo42_hamiltonian()
{
    auto H = canonical_H2(CaseTag::c42, Rat(1)) + patterns::quartic_kernel_42(Rat(1), Rat(0), Rat(1));
    return to_double_poly(H);
}

} // namespace

TEST_CASE("flow: linear rotation returns after 2 pi")
{
    auto A = canonical_A(CaseTag::c42, 1.0);
    CompiledField X(linear_field(A));
    FlowConfig cfg;
    std::vector<double> x0{0.3, 0.0, -0.2, 0.4};
    auto xT = flow(X, x0, 2 * M_PI, cfg);
    for (int i = 0; i < 4; ++i)
        CHECK(std::fabs(xT[i] - x0[i]) <= 1e-10);
}

TEST_CASE("flow: energy conservation and time reversibility of integration")
{
    auto Xp = demo42_field();
    auto H = demo42_hamiltonian();
    CompiledField X(Xp);
    FlowConfig cfg;
    std::vector<double> x0{0.1, 0.05, -0.08, 0.12};
    double H0 = eval(H, x0);

    std::vector<double> times;
    for (int k = 1; k <= 20; ++k)
        times.push_back(5.0 * k);
    auto traj = flow_samples(X, x0, times, cfg);
    for (const auto& p : traj)
        CHECK(std::fabs(eval(H, p) - H0) <= 1e-9);

    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(-0.2, 0.2);
    for (int t = 0; t < 5; ++t) {
        std::vector<double> p{u(rng), u(rng), u(rng), u(rng)};
        auto q = flow(X, flow(X, p, 7.0, cfg), -7.0, cfg);
        for (int i = 0; i < 4; ++i)
            CHECK(std::fabs(q[i] - p[i]) <= 1e-9);
    }
}

TEST_CASE("reversibility_residual: exact for reversible fields, linear in a broken term")
{
    auto Xp = demo42_field();
    auto R = to_double_mat(canonical_R<Rat>(CaseTag::c42));
    FlowConfig cfg;
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> u(-0.3, 0.3);
    std::vector<std::vector<double>> pts;
    for (int k = 0; k < 10; ++k)
        pts.push_back({u(rng), u(rng), u(rng), u(rng)});

    auto rep = reversibility_residual(Xp, R, pts, cfg);
    CHECK(rep.pointwise == 0.0); // polynomial identity, evaluated exactly in doubles
    CHECK(rep.orbit_level <= 1e-9);

    // X + eps * x is not reversible; the pointwise residual scales linearly
    double r1 = 0, r2 = 0;
    for (double eps : {1e-3, 2e-3}) {
        auto Xb = Xp;
        for (int i = 0; i < 4; ++i)
            Xb[i] += Poly<double>::variable(4, i).scaled(eps);
        auto rb = reversibility_residual(Xb, R, pts, cfg);
        (eps == 1e-3 ? r1 : r2) = rb.pointwise;
    }
    CHECK(std::fabs(r2 / r1 - 2.0) <= 1e-6);
}

TEST_CASE("symmetric_shoot: harmonic orbit on the linear field")
{
    auto A = canonical_A(CaseTag::c42, 1.0);
    CompiledField X(linear_field(A));
    FlowConfig cfg;
    ShootProblem prob;
    prob.Rhat = to_double_mat(canonical_R<Rat>(CaseTag::c42));
    prob.seed = {0.0, 0.0, 0.0, 0.1};
    prob.period_seed = 6.0;
    prob.rotation_coords = rotation_coords(CaseTag::c42);
    auto res = symmetric_shoot(X, prob, cfg);
    REQUIRE(res.status == ShootStatus::converged);
    CHECK(std::fabs(res.record.T - 2 * M_PI) <= 1e-9);
}

TEST_CASE("symmetric_shoot: 4:2 demo orbit at sigma = 1e-3")
{
    CompiledField X(demo42_field());
    FlowConfig cfg;
    double sigma = 1e-3;
    ShootProblem prob;
    prob.Rhat = to_double_mat(canonical_R<Rat>(CaseTag::c42));
    prob.seed = {0.0, 0.0, 0.0, std::sqrt(sigma)};
    prob.period_seed = 2 * M_PI / (1 + sigma);
    prob.pinned = {1}; // family y1 = 0
    prob.anchor = 3;
    prob.rotation_coords = rotation_coords(CaseTag::c42);
    auto res = symmetric_shoot(X, prob, cfg);
    REQUIRE(res.status == ShootStatus::converged);
    CHECK(std::fabs(res.record.T - 2 * M_PI / (1 + sigma)) <= 1e-3);

    auto H = demo42_hamiltonian();
    auto R = to_double_mat(canonical_R<Rat>(CaseTag::c42));
    certify_record(X, R, &H, cfg, res.record);
    CHECK(res.record.closure_residual <= 1e-10);
    CHECK(res.record.fix_residual <= cfg.newton_tol);
    CHECK(res.record.energy_drift <= 1e-8);
    CHECK(res.record.symmetry_residual <= 10 * 1e-9);
}

TEST_CASE("symmetric_shoot: far seed diverges or stalls, trivial seed flagged")
{
    CompiledField X(demo42_field());
    FlowConfig cfg;
    ShootProblem prob;
    prob.Rhat = to_double_mat(canonical_R<Rat>(CaseTag::c42));
    prob.seed = {0.0, 40.0, 0.0, 55.0};
    prob.period_seed = 6.0;
    prob.rotation_coords = rotation_coords(CaseTag::c42);
    auto res = symmetric_shoot(X, prob, cfg);
    CHECK(res.status != ShootStatus::converged);

    prob.seed = {0.0, 0.0, 0.0, 1e-10};
    prob.period_seed = 2 * M_PI;
    auto res2 = symmetric_shoot(X, prob, cfg);
    CHECK(res2.status == ShootStatus::trivial);
}

TEST_CASE("continue_family on the 4:2 demo: sqrt law and period limit")
{
    auto model = time_rescale(canonical_model(CaseTag::c42, Rat(1)));
    auto H = canonical_H2(model.tag, Rat(1)) + patterns::quartic_kernel_42(Rat(1), Rat(0), Rat(1));
    auto nf = birkhoff_normalize(H, 4, model);
    auto rm = build_reduced_map(nf, model, 4);
    auto an = analyze_branches(restrict_to_fix(rm));
    REQUIRE(an.verdict == BranchVerdict::families);

    CompiledField X(to_double_field(nf.normalized_field));
    auto R = to_double_mat(model.R);
    auto Hd = to_double_poly(H);
    FlowConfig cfg;
    std::vector<double> grid;
    for (int k = 0; k < 10; ++k)
        grid.push_back(1e-2 * std::pow(10.0, -3.0 * k / 9.0)); // logspace 1e-2 .. 1e-5

    auto cont = continue_family(X, R, an.families[0], 1.0, grid, cfg, &Hd);
    REQUIRE(cont.records.size() == grid.size());
    CHECK(cont.amplitude_monotone);
    CHECK(std::fabs(cont.amplitude_slope - 0.5) <= 0.02);
    for (const auto& r : cont.records) {
        CHECK(r.closure_residual <= 1e-10);
        CHECK(std::fabs(r.T - 2 * M_PI / (1 + r.sigma)) <= 1e-6);
    }
    // period tends to 2 pi
    CHECK(std::fabs(cont.records.back().T - 2 * M_PI) <= 1e-4);
}

TEST_CASE("absence_scan: Theorem-B demo finds nothing, Theorem-A control finds orbits")
{
    // 6:2 demo with leading pair (x2^2, x3^2)
    auto model62 = time_rescale(canonical_model(CaseTag::c62, Rat(1)));
    std::array<Rat, 10> c{};
    c[2] = -1;
    c[4] = 1;
    auto H62 = canonical_H2(model62.tag, Rat(1)) + patterns::kernel_cubic_62(c);
    CompiledField X62(to_double_field(hamiltonian_vector_field(H62, model62.Jop)));
    FlowConfig cfg;
    auto rep = absence_scan(X62, to_double_mat(model62.R), CaseTag::c62, 0.1, 500,
                            2 * M_PI - 0.5, 2 * M_PI + 0.5, cfg);
    CHECK(rep.nontrivial_in_ball == 0);
    CHECK(rep.counts.trivial + rep.counts.diverged + rep.counts.maxiter + rep.counts.singular
              + rep.counts.converged == 500);

    // positive control: same machinery on the 4:2 demo
    CompiledField X42(demo42_field());
    auto rep2 = absence_scan(X42, to_double_mat(canonical_R<Rat>(CaseTag::c42)), CaseTag::c42, 0.1, 200,
                             2 * M_PI - 0.5, 2 * M_PI + 0.5, cfg);
    CHECK(rep2.nontrivial_in_ball > 0);

    // empty scan: no verdict
    auto rep3 = absence_scan(X42, to_double_mat(canonical_R<Rat>(CaseTag::c42)), CaseTag::c42, 0.1, 0,
                             2 * M_PI - 0.5, 2 * M_PI + 0.5, cfg);
    CHECK(rep3.verdict == "empty scan: no verdict");
}

TEST_CASE("continue_family on the 6:4 demo at two lambda charts")
{
    auto model = time_rescale(canonical_model(CaseTag::c64, Rat(1)));
    auto H = canonical_H2(model.tag, Rat(1))
           + patterns::kernel_quartic_64<Rat>({Rat(-1), Rat(0), Rat(-1), Rat(0), Rat(0), Rat(0)});
    auto nf = birkhoff_normalize(H, 4, model);
    auto rm = build_reduced_map(nf, model, 4);
    auto an = analyze_branches(restrict_to_fix(rm));
    REQUIRE(an.verdict == BranchVerdict::families);
    const auto& fam = an.families[0]; // y2=0, y3-law, sigma < 0

    CompiledField X(to_double_field(nf.normalized_field));
    auto R = to_double_mat(model.R);
    auto Hd = to_double_poly(H);
    FlowConfig cfg;
    std::vector<double> grid{1e-3, 3e-4, 1e-4, 3e-5, 1e-5};

    for (int chart = 0; chart < 2; ++chart) {
        bool boundary = chart == 1;
        auto cont = continue_family(X, R, fam, 1.0, grid, cfg, &Hd, boundary ? 0.0 : 0.5, boundary);
        REQUIRE(cont.records.size() == grid.size());
        for (const auto& r : cont.records) {
            CHECK(r.sigma < 0);
            CHECK(r.closure_residual <= 1e-9);
        }
        CHECK(cont.records.back().amplitude < cont.records.front().amplitude);
        CHECK(std::fabs(cont.records.back().T - 2 * M_PI) <= 1e-4);
    }
}
