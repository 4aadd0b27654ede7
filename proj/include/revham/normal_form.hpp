#pragma once

#include "revham/graded_ops.hpp"

#include <utility>
#include <vector>

namespace revham {

enum class NormalFormKind { birkhoff, belitskii };

struct DegreeCertificate {
    int degree = 0;
    bool exact_zero = false; // exact-arithmetic zero residual
    double residual = 0;     // max-abs residual coefficient (float path)
    double parity_residual = 0;
};

template <class K>
struct NormalFormResult {
    NormalFormKind kind;
    CaseTag tag;
    int order = 0;
    bool truncated = false;

    Poly<K> input_hamiltonian{0};
    Poly<K> normalized_hamiltonian{0};
    PolyVector<K> input_field;
    PolyVector<K> normalized_field; // full field A x + h(x)
    std::vector<std::pair<int, Poly<K>>> generators;
    std::vector<std::pair<int, PolyVector<K>>> field_generators;
    std::vector<DegreeCertificate> certificates;

    /// Nonlinear part h of the normalized field.
    PolyVector<K> nonlinear_part() const
    {
        return grade_range(normalized_field, 2, order);
    }
};

namespace detail {

template <class K>
double residual_of(const Poly<K>& p)
{
    return max_coeff_abs(p);
}

template <class K>
double residual_of(const PolyVector<K>& v)
{
    return max_coeff_abs(v);
}

template <class K, class Obj>
DegreeCertificate make_cert(int d, const Obj& defect, const char* what, double rel_scale)
{
    DegreeCertificate c;
    c.degree = d;
    double r = residual_of(defect);
    if constexpr (field<K>::exact) {
        if (r != 0)
            throw normal_form_error(std::string(what) + " not exactly zero at degree " + std::to_string(d));
        c.exact_zero = true;
    } else {
        c.residual = r;
        if (r > 1e-9 * std::max(1.0, rel_scale))
            throw normal_form_error(std::string(what) + " residual " + std::to_string(r)
                                    + " exceeds tolerance at degree " + std::to_string(d));
    }
    return c;
}

} // namespace detail

/// H o time-1 flow of X_Phi as a Lie series: sum_k ad_Phi^k H / k!,
/// ad_Phi(f) = {f, Phi}. Terminates by degree growth; truncated at ctx.order.
template <class K>
Poly<K> lie_transform(const Poly<K>& H, const Poly<K>& Phi, const Mat<K>& Jop, const TruncContext& ctx)
{
    Poly<K> out = H;
    Poly<K> term = H;
    K coef = field<K>::one();
    for (int k = 1; k <= ctx.order; ++k) {
        term = poisson_bracket(term, Phi, Jop, ctx);
        if (term.is_zero())
            break;
        coef /= field<K>::from_int(k); // coef = 1/k!
        out += term.scaled(coef);
    }
    return out;
}

/// Pushforward of X by the time-1 flow of W: sum_k ad_W^k X / k!,
/// ad_W(X) = [W, X].
template <class K>
PolyVector<K> lie_transform_field(const PolyVector<K>& X, const PolyVector<K>& W, const TruncContext& ctx)
{
    PolyVector<K> out = X;
    PolyVector<K> term = X;
    K coef = field<K>::one();
    for (int k = 1; k <= ctx.order; ++k) {
        term = lie_bracket(W, term, ctx);
        if (term.is_zero())
            break;
        coef /= field<K>::from_int(k);
        out += term.scaled(coef);
    }
    return out;
}

/// Reversible Birkhoff normalization: for each degree d = 3..N, split H_d
/// along ker(Ad_{H2}) + Ad_{H2}(H_d^+) and cancel the range part with a
/// generator chosen invariant (H o Rhat = +Phi), so anti-invariance survives
/// every step. Certifies {H2, H~_d} = 0 and parity after each degree.
template <class K>
NormalFormResult<K> birkhoff_normalize(const Poly<K>& H, int order, const CanonicalModel<K>& model)
{
    int n = H.dim();
    if (n != case_dim(model.tag))
        throw normal_form_error("birkhoff_normalize: dimension mismatch with the model");
    TruncContext ctx(order);
    auto signs = canonical_R_signs(model.tag);

    K freq = model.rescaled ? field<K>::one() : model.alpha;
    Poly<K> H2 = grade(H, 2);
    {
        auto expect = canonical_H2(model.tag, freq);
        auto diff = H2 - expect;
        if (field<K>::exact ? !diff.is_zero() : max_coeff_abs(diff) > 1e-10)
            throw normal_form_error("birkhoff_normalize: quadratic part is not the canonical H2");
    }
    {
        auto defect = anti_invariance_defect(H, model.R, ctx);
        if (field<K>::exact ? !defect.is_zero() : max_coeff_abs(defect) > 1e-10)
            throw normal_form_error("birkhoff_normalize: H is not Rhat-anti-invariant");
    }

    NormalFormResult<K> out;
    out.kind = NormalFormKind::birkhoff;
    out.tag = model.tag;
    out.order = order;
    out.input_hamiltonian = H;

    Poly<K> cur = grade_range(H, 0, order);
    double scale = std::max(1.0, max_coeff_abs(H));
    for (int d = 3; d <= order; ++d) {
        Poly<K> Hd = grade(cur, d);
        Poly<K> Phi(n);
        if (!Hd.is_zero()) {
            auto opP = ad_matrix(H2, d, +1, model.Jop, signs);
            auto opM = ad_matrix(H2, d, -1, model.Jop, signs);
            auto b = to_coords(Hd, opM.domain);
            auto sol = homological_solve(opP, opM, b);
            bool nonzero = false;
            for (const auto& c : sol.preimage)
                if (!field<K>::is_zero(c))
                    nonzero = true;
            if (nonzero) {
                for (auto& c : sol.preimage)
                    c = -c;
                Phi = poly_from_coords(sol.preimage, opP.domain, n);
                cur = grade_range(lie_transform(cur, Phi, model.Jop, ctx), 0, order);
            }
        }
        out.generators.emplace_back(d, Phi);

        auto cert = detail::make_cert<K>(d, poisson_bracket(H2, grade(cur, d), model.Jop, ctx),
                                         "Birkhoff bracket certificate", scale);
        auto pdef = anti_invariance_defect(grade(cur, d), model.R, ctx);
        cert.parity_residual = max_coeff_abs(pdef);
        if (field<K>::exact && cert.parity_residual != 0)
            throw normal_form_error("anti-invariance lost at degree " + std::to_string(d));
        out.certificates.push_back(cert);
    }
    out.normalized_hamiltonian = cur;
    out.input_field = hamiltonian_vector_field(grade_range(H, 0, order), model.Jop);
    out.normalized_field = grade_range(hamiltonian_vector_field(cur, model.Jop), 1, order);
    out.truncated = ctx.truncated;
    return out;
}

/// Reversible Belitskii normalization of a vector field with semisimple
/// canonical linear part: per degree, remove the range of ad_A using an
/// equivariant generator; what remains commutes with A^T (A here is
/// antisymmetric, so ker ad_{A^T} = ker ad_A).
template <class K>
NormalFormResult<K> belitskii_normalize(const PolyVector<K>& X, int order, const CanonicalModel<K>& model)
{
    int n = X.size();
    if (n != case_dim(model.tag) || X.vars() != n)
        throw normal_form_error("belitskii_normalize: dimension mismatch with the model");
    TruncContext ctx(order);
    auto signs = canonical_R_signs(model.tag);

    Mat<K> A = linear_part(X);
    if ((A - model.A).max_abs() > (field<K>::exact ? 0.0 : 1e-10))
        throw normal_form_error("belitskii_normalize: linear part differs from the model's A-hat");
    {
        auto defect = reversibility_defect(X, model.R, ctx);
        if (field<K>::exact ? !defect.is_zero() : max_coeff_abs(defect) > 1e-10)
            throw normal_form_error("belitskii_normalize: field is not Rhat-reversible");
    }

    NormalFormResult<K> out;
    out.kind = NormalFormKind::belitskii;
    out.tag = model.tag;
    out.order = order;
    out.input_field = X;

    PolyVector<K> cur = grade_range(X, 1, order);
    double scale = std::max(1.0, max_coeff_abs(X));
    for (int d = 2; d <= order; ++d) {
        PolyVector<K> Xd = grade(cur, d);
        PolyVector<K> W(n, n);
        if (!Xd.is_zero()) {
            auto opE = lie_operator_matrix(A, d, +1, signs); // equivariant -> reversible
            auto opA = lie_operator_matrix(A, d, -1, signs);
            auto b = to_coords(Xd, opA.domain);
            auto sol = homological_solve(opE, opA, b);
            bool nonzero = false;
            for (const auto& c : sol.preimage)
                if (!field<K>::is_zero(c))
                    nonzero = true;
            if (nonzero) {
                W = field_from_coords(sol.preimage, opE.domain, n);
                cur = grade_range(lie_transform_field(cur, W, ctx), 1, order);
            }
        }
        out.field_generators.emplace_back(d, W);

        auto h = grade_range(cur, 2, order);
        auto cert = detail::make_cert<K>(d, belitskii_defect(grade(h, d), A, ctx),
                                         "Belitskii commutation certificate", scale);
        auto rdef = reversibility_defect(grade(cur, d), model.R, ctx);
        cert.parity_residual = max_coeff_abs(rdef);
        if (field<K>::exact && cert.parity_residual != 0)
            throw normal_form_error("reversibility lost at degree " + std::to_string(d));
        out.certificates.push_back(cert);
    }
    out.normalized_field = cur;
    out.truncated = ctx.truncated;
    return out;
}

/// Birkhoff Condition check: Ad_{H2}(H) = 0 through the requested order.
/// When it passes, the Observation-6.2 implication is checked rather than
/// assumed: X_H must satisfy the Belitskii identity.
struct BirkhoffConditionReport {
    bool pass = false;
    std::vector<int> failing_degrees;
    double max_residual = 0;
    bool belitskii_identity_checked = false;
    bool belitskii_identity_holds = false;
};

template <class K>
BirkhoffConditionReport check_birkhoff_condition(const Poly<K>& H, const CanonicalModel<K>& model, int order)
{
    TruncContext ctx(order);
    Poly<K> H2 = grade(H, 2);
    BirkhoffConditionReport rep;
    rep.pass = true;
    for (int d = 2; d <= order; ++d) {
        auto resid = poisson_bracket(H2, grade(H, d), model.Jop, ctx);
        double r = max_coeff_abs(resid);
        bool zero = field<K>::exact ? resid.is_zero() : r <= 1e-10 * std::max(1.0, max_coeff_abs(H));
        if (!zero) {
            rep.pass = false;
            rep.failing_degrees.push_back(d);
            rep.max_residual = std::max(rep.max_residual, r);
        }
    }
    if (rep.pass) {
        auto X = hamiltonian_vector_field(grade_range(H, 0, order), model.Jop);
        Mat<K> A = linear_part(X);
        auto h = grade_range(X, 2, order);
        auto defect = belitskii_defect(h, A, ctx);
        rep.belitskii_identity_checked = true;
        rep.belitskii_identity_holds =
            field<K>::exact ? defect.is_zero() : max_coeff_abs(defect) <= 1e-9 * std::max(1.0, max_coeff_abs(X));
    }
    return rep;
}

} // namespace revham
