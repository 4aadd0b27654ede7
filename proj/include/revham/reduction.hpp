#pragma once

#include "revham/normal_form.hpp"

#include <array>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace revham {

struct reduction_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// The finite-order Liapunov-Schmidt bifurcation map
///   B(u, sigma) = (1+sigma) S u - A u - h(u) = sigma S u - h(u)
/// (A = S: semisimple), held as n polynomials in the n+1 variables (u, sigma).
template <class K>
struct ReducedMap {
    CaseTag tag;
    int n = 0;
    int order = 0;
    PolyVector<K> B;
    Mat<K> S;
    double equivariance_residual = 0;      // DB.(S0 u) - S0 B
    double anti_equivariance_residual = 0; // Rhat B + B o Rhat
};

/// sigma is always the trailing variable of the extended set.
inline int sigma_index(int n) { return n; }

template <class K>
ReducedMap<K> build_reduced_map(const NormalFormResult<K>& nf, const CanonicalModel<K>& model, int order)
{
    int n = case_dim(model.tag);
    if (!model.rescaled && field<K>::to_double(model.alpha) != 1.0)
        throw reduction_error("build_reduced_map expects a rescaled model (alpha = 1 internally)");
    Mat<K> S = model.A;
    {
        Mat<K> lin = linear_part(nf.normalized_field);
        if ((lin - S).max_abs() > (field<K>::exact ? 0.0 : 1e-9))
            throw reduction_error("normal form linear part does not match the model's A-hat");
    }
    TruncContext ctx(order);
    PolyVector<K> h = grade_range(nf.normalized_field, 2, order);

    ReducedMap<K> rm;
    rm.tag = model.tag;
    rm.n = n;
    rm.order = order;
    rm.S = S;
    rm.B = PolyVector<K>(n, n + 1);
    Poly<K> sg = Poly<K>::variable(n + 1, sigma_index(n));
    for (int i = 0; i < n; ++i) {
        Poly<K> lin(n + 1);
        for (int j = 0; j < n; ++j)
            if (!field<K>::is_zero(S(i, j)))
                lin += Poly<K>::variable(n + 1, j).scaled(S(i, j));
        TruncContext cx(order + 1);
        rm.B[i] = mul(sg, lin, cx) - extend_dim(h[i], n + 1);
    }

    // infinitesimal S^1-equivariance: DB.(S0 u) - S0 B = 0, S0 the rotation generator
    {
        PolyVector<K> S0u(n + 1, n + 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (!field<K>::is_zero(S(i, j)))
                    S0u[i] += Poly<K>::variable(n + 1, j).scaled(S(i, j));
        TruncContext cx(order + 1);
        auto defect = apply_jacobian(rm.B, S0u, cx) - matrix_apply(S, rm.B);
        rm.equivariance_residual = max_coeff_abs(defect);
        if (field<K>::exact && rm.equivariance_residual != 0)
            throw reduction_error("S^1-equivariance identity failed on B");
    }
    // anti-equivariance: Rhat B(u,sigma) + B(Rhat u, sigma) = 0
    {
        Mat<K> Rext = Mat<K>::identity(n + 1);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                Rext(i, j) = model.R(i, j);
        Rext(n, n) = field<K>::one();
        TruncContext cx(order + 1);
        PolyVector<K> BR(n, n + 1);
        auto rows = Rext.row_major();
        for (int i = 0; i < n; ++i)
            BR[i] = substitute_linear(rm.B[i], rows, cx);
        auto defect = matrix_apply(model.R, rm.B) + BR;
        rm.anti_equivariance_residual = max_coeff_abs(defect);
        if (field<K>::exact && rm.anti_equivariance_residual != 0)
            throw reduction_error("R-anti-equivariance identity failed on B");
    }
    // B(0, sigma) = 0: every term must involve some u variable
    for (int i = 0; i < n; ++i) {
        std::vector<bool> keep(n + 1, false);
        keep[sigma_index(n)] = true;
        if (!substitute_zero(rm.B[i], keep).is_zero())
            throw reduction_error("B(0, sigma) != 0");
    }
    return rm;
}

/// Components of B surviving on Fix(Rhat), per case:
/// 4:2 slots {0,2}; 6:2 slots {0,1,3,5}; 6:4 slots {2,4}.
inline std::vector<int> expected_active_slots(CaseTag t)
{
    switch (t) {
    case CaseTag::c42: return {0, 2};
    case CaseTag::c62: return {0, 1, 3, 5};
    case CaseTag::c64: return {2, 4};
    }
    return {};
}

template <class K>
struct RestrictedMap {
    CaseTag tag;
    int n = 0;
    std::vector<int> active_slots;
    std::vector<int> dropped_slots; // certified identically zero on Fix
    PolyVector<K> G;                // active components, in (u, sigma) with complement coords killed
    bool dropped_exact = true;
};

template <class K>
RestrictedMap<K> restrict_to_fix(const ReducedMap<K>& rm)
{
    int n = rm.n;
    auto mask = fix_mask(rm.tag);
    std::vector<bool> keep(n + 1, false);
    for (int i = 0; i < n; ++i)
        keep[i] = mask[i];
    keep[sigma_index(n)] = true;

    auto expected = expected_active_slots(rm.tag);
    auto is_expected = [&](int i) {
        return std::find(expected.begin(), expected.end(), i) != expected.end();
    };

    RestrictedMap<K> out;
    out.tag = rm.tag;
    out.n = n;
    std::vector<Poly<K>> comps;
    for (int i = 0; i < n; ++i) {
        Poly<K> gi = substitute_zero(rm.B[i], keep);
        bool zero = field<K>::exact ? gi.is_zero() : max_coeff_abs(gi) <= 1e-12;
        if (is_expected(i)) {
            out.active_slots.push_back(i);
            comps.push_back(std::move(gi));
        } else if (zero) {
            out.dropped_slots.push_back(i);
        } else {
            throw reduction_error("component " + std::to_string(i)
                                  + " of B does not vanish identically on Fix(Rhat); upstream data inconsistent");
        }
    }
    out.G = PolyVector<K>(std::move(comps));
    return out;
}

// ---------------------------------------------------------------------------
// Branch analysis
// ---------------------------------------------------------------------------

struct BranchFamily {
    CaseTag tag;
    std::string id;           // e.g. "y1=0, y2 = +sqrt(sigma/a3)"
    int zero_coord = -1;      // Fix coordinate pinned to zero along the family
    int law_coord = -1;       // coordinate obeying the square-root law
    double law_denom = 0;     // a3 / a1 / a5 / a7
    int law_sign = +1;        // branch sign (+/- sqrt)
    int sigma_side = +1;      // sign of sigma on which the family exists
    double lin_x1 = 0, lin_y1 = 0; // 6:4: a1, a2 in sigma + a1 x1 + a2 y1
    double alpha = 1;         // physical frequency; period limit 2 pi / alpha
};

enum class BranchVerdict { families, no_branch, degenerate };

template <class K>
struct BranchAnalysis {
    CaseTag tag;
    BranchVerdict verdict;
    std::vector<BranchFamily> families;
    std::string note;
    // 4:2 / 6:4 cofactor data
    std::vector<K> coeffs;         // a1..a3 (4:2) or a1..a7 (6:4)
    Poly<K> cofactor{0};           // the shared factor F with G_i = u_i * F
    // 6:2 data
    std::array<K, 6> forms{};      // b1,b2,b3,b4,b5,b6
    K resultant = field<K>::zero();
};

namespace detail {

template <class K>
K mono_coeff(const Poly<K>& p, int nvars, std::initializer_list<std::pair<int, int>> exps)
{
    Monomial m(nvars);
    for (auto [i, e] : exps)
        m.e[i] = static_cast<uint8_t>(e);
    return p.coefficient(m);
}

} // namespace detail

template <class K>
BranchAnalysis<K> analyze_branches(const RestrictedMap<K>& rm, double alpha = 1.0)
{
    int n = rm.n;
    int nv = n + 1;
    int sg = sigma_index(n);
    BranchAnalysis<K> out;
    out.tag = rm.tag;

    auto near_zero = [&](const K& v) {
        return field<K>::exact ? field<K>::is_zero(v)
                               : std::fabs(field<K>::to_double(v)) <= 1e-12;
    };

    if (rm.tag == CaseTag::c42) {
        // G = (y1 * F, y2 * F): shared cofactor forced by the Birkhoff condition
        Poly<K> F0 = divide_by_variable(rm.G[0], 1);
        Poly<K> F1 = divide_by_variable(rm.G[1], 3);
        if (!(F0 - F1).is_zero() && field<K>::exact)
            throw reduction_error("4:2 cofactors of G differ; input not in normal form");
        out.cofactor = F0;
        K s_coef = detail::mono_coeff(F0, nv, {{sg, 1}});
        if (!near_zero(s_coef - field<K>::one()))
            throw reduction_error("4:2 cofactor sigma-coefficient is not +1");
        K a1 = -detail::mono_coeff(F0, nv, {{1, 2}});
        K a2 = -detail::mono_coeff(F0, nv, {{1, 1}, {3, 1}});
        K a3 = -detail::mono_coeff(F0, nv, {{3, 2}});
        out.coeffs = {a1, a2, a3};
        if (near_zero(a1) || near_zero(a3)) {
            out.verdict = BranchVerdict::degenerate;
            out.note = "a1*a3 = 0: outside the open set U^0";
            return out;
        }
        out.verdict = BranchVerdict::families;
        for (int s : {+1, -1}) {
            BranchFamily f;
            f.tag = rm.tag;
            f.zero_coord = 1;
            f.law_coord = 3;
            f.law_denom = field<K>::to_double(a3);
            f.law_sign = s;
            f.sigma_side = field<K>::to_double(a3) > 0 ? +1 : -1;
            f.alpha = alpha;
            f.id = std::string("y1=0, y2 = ") + (s > 0 ? "+" : "-") + "sqrt(sigma/a3)";
            out.families.push_back(f);
        }
        for (int s : {+1, -1}) {
            BranchFamily f;
            f.tag = rm.tag;
            f.zero_coord = 3;
            f.law_coord = 1;
            f.law_denom = field<K>::to_double(a1);
            f.law_sign = s;
            f.sigma_side = field<K>::to_double(a1) > 0 ? +1 : -1;
            f.alpha = alpha;
            f.id = std::string("y2=0, y1 = ") + (s > 0 ? "+" : "-") + "sqrt(sigma/a1)";
            out.families.push_back(f);
        }
        return out;
    }

    if (rm.tag == CaseTag::c62) {
        // leading quadratic binary forms in (x2, x3) = coords 2, 4
        const Poly<K>& g0 = rm.G[0];
        const Poly<K>& g1 = rm.G[1];
        K b1 = detail::mono_coeff(g0, nv, {{2, 2}});
        K b2 = detail::mono_coeff(g0, nv, {{2, 1}, {4, 1}});
        K b3 = detail::mono_coeff(g0, nv, {{4, 2}});
        K b4 = detail::mono_coeff(g1, nv, {{2, 2}});
        K b5 = detail::mono_coeff(g1, nv, {{2, 1}, {4, 1}});
        K b6 = detail::mono_coeff(g1, nv, {{4, 2}});
        out.forms = {b1, b2, b3, b4, b5, b6};
        // resultant of the two binary quadratics: nonzero iff no common factor
        K t1 = b1 * b6 - b3 * b4;
        K t2 = b1 * b5 - b2 * b4;
        K t3 = b2 * b6 - b3 * b5;
        out.resultant = t1 * t1 - t2 * t3;
        if (near_zero(out.resultant)) {
            out.verdict = BranchVerdict::degenerate;
            out.note = "zero resultant: leading forms share a factor, outside U^1";
        } else {
            out.verdict = BranchVerdict::no_branch;
            out.note = "nonzero resultant: no symmetric periodic orbit near the equilibrium (Theorem-B regime)";
        }
        return out;
    }

    // 6:4: G = (y2 * F, y3 * F) on Fix coords (x1,y1,y2,y3) = (0,1,3,5)
    Poly<K> F0 = divide_by_variable(rm.G[0], 3);
    Poly<K> F1 = divide_by_variable(rm.G[1], 5);
    if (!(F0 - F1).is_zero() && field<K>::exact)
        throw reduction_error("6:4 cofactors of G differ; input not in normal form");
    out.cofactor = F0;
    K s_coef = detail::mono_coeff(F0, nv, {{sg, 1}});
    if (!near_zero(s_coef - field<K>::one()))
        throw reduction_error("6:4 cofactor sigma-coefficient is not +1");
    K a1 = detail::mono_coeff(F0, nv, {{0, 1}});
    K a2 = detail::mono_coeff(F0, nv, {{1, 1}});
    K a3 = detail::mono_coeff(F0, nv, {{0, 2}});
    K a4 = detail::mono_coeff(F0, nv, {{1, 2}});
    K a5 = detail::mono_coeff(F0, nv, {{3, 2}});
    K a6 = detail::mono_coeff(F0, nv, {{3, 1}, {5, 1}});
    K a7 = detail::mono_coeff(F0, nv, {{5, 2}});
    out.coeffs = {a1, a2, a3, a4, a5, a6, a7};
    if (near_zero(a5) || near_zero(a7)) {
        out.verdict = BranchVerdict::degenerate;
        out.note = "a5*a7 = 0: outside the open set U^2";
        return out;
    }
    out.verdict = BranchVerdict::families;
    for (int s : {+1, -1}) {
        BranchFamily f;
        f.tag = rm.tag;
        f.zero_coord = 3; // y2 = 0
        f.law_coord = 5;  // y3 law
        f.law_denom = field<K>::to_double(a7);
        f.law_sign = s;
        f.sigma_side = field<K>::to_double(a7) > 0 ? -1 : +1; // need (sigma + ...)/a7 < 0
        f.lin_x1 = field<K>::to_double(a1);
        f.lin_y1 = field<K>::to_double(a2);
        f.alpha = alpha;
        f.id = std::string("y2=0, y3 = ") + (s > 0 ? "+" : "-") + "sqrt(-(sigma+a1*x1+a2*y1)/a7)";
        out.families.push_back(f);
    }
    for (int s : {+1, -1}) {
        BranchFamily f;
        f.tag = rm.tag;
        f.zero_coord = 5;
        f.law_coord = 3;
        f.law_denom = field<K>::to_double(a5);
        f.law_sign = s;
        f.sigma_side = field<K>::to_double(a5) > 0 ? -1 : +1;
        f.lin_x1 = field<K>::to_double(a1);
        f.lin_y1 = field<K>::to_double(a2);
        f.alpha = alpha;
        f.id = std::string("y3=0, y2 = ") + (s > 0 ? "+" : "-") + "sqrt(-(sigma+a1*x1+a2*y1)/a5)";
        out.families.push_back(f);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Newton refinement of branch points on the reduced map
// ---------------------------------------------------------------------------

struct BranchPoint {
    double sigma = 0;
    double lambda = 0;      // 6:4 chart parameter; ignored elsewhere
    bool lambda_boundary = false;
    std::vector<double> u;  // phase-space point in Fix coordinates (length n)
    double residual = 0;    // max |G_i| at the refined point
    bool converged = false;
};

/// Leading-order seed for a family at parameter sigma (and lambda for 6:4).
inline std::optional<double> branch_seed(const BranchFamily& f, double sigma, double x1, double y1)
{
    double arg;
    if (f.tag == CaseTag::c64)
        arg = -(sigma + f.lin_x1 * x1 + f.lin_y1 * y1) / f.law_denom;
    else
        arg = sigma / f.law_denom;
    if (arg < 0)
        return std::nullopt;
    return f.law_sign * std::sqrt(arg);
}

/// Refine the family's law coordinate by 1-D Newton on the cofactor (4:2,
/// 6:4) with the zero coordinate pinned. The full-G residual is reported.
template <class K>
std::vector<BranchPoint> numeric_branch_continue(const RestrictedMap<K>& rm, const BranchAnalysis<K>& an,
                                                 const BranchFamily& f, const std::vector<double>& sigma_grid,
                                                 double lambda = 0.0, bool lambda_boundary = false,
                                                 double tol = 1e-12, int max_iter = 60)
{
    if (an.verdict != BranchVerdict::families)
        throw reduction_error("numeric_branch_continue: analysis emitted no families");
    int n = rm.n;
    auto Fd = to_double_poly(an.cofactor);
    auto dF = partial(Fd, f.law_coord);
    PolyVector<double> Gd = to_double_field(rm.G);

    std::vector<BranchPoint> table;
    for (double smag : sigma_grid) {
        BranchPoint pt;
        pt.sigma = f.sigma_side * std::fabs(smag);
        pt.lambda = lambda;
        pt.lambda_boundary = lambda_boundary;
        pt.u.assign(n, 0.0);
        double x1 = 0, y1 = 0;
        if (rm.tag == CaseTag::c64) {
            if (lambda_boundary) {
                x1 = pt.sigma;
                y1 = 0;
            } else {
                x1 = lambda * pt.sigma;
                y1 = pt.sigma;
            }
            pt.u[0] = x1;
            pt.u[1] = y1;
        }
        if (pt.sigma == 0.0) {
            pt.converged = true; // the trivial solution: family terminates at the equilibrium
            table.push_back(pt);
            continue;
        }
        auto seed = branch_seed(f, pt.sigma, x1, y1);
        if (!seed) {
            pt.converged = false;
            table.push_back(pt);
            continue;
        }
        std::vector<double> z(n + 1, 0.0);
        if (rm.tag == CaseTag::c64) {
            z[0] = x1;
            z[1] = y1;
        }
        z[sigma_index(n)] = pt.sigma;
        double w = *seed;
        bool ok = false;
        for (int it = 0; it < max_iter; ++it) {
            z[f.law_coord] = w;
            double val = eval(Fd, z);
            double der = eval(dF, z);
            if (der == 0)
                break;
            double step = val / der;
            w -= step;
            if (std::fabs(step) < tol * std::max(1.0, std::fabs(w))) {
                ok = true;
                break;
            }
        }
        z[f.law_coord] = w;
        pt.u[f.law_coord] = w;
        if (rm.tag == CaseTag::c42) {
            pt.u[f.zero_coord] = 0;
        }
        double resid = 0;
        for (int i = 0; i < Gd.size(); ++i)
            resid = std::max(resid, std::fabs(eval(Gd[i], z)));
        pt.residual = resid;
        pt.converged = ok && resid <= 1e-12;
        table.push_back(pt);
    }
    return table;
}

} // namespace revham
