#pragma once

#include "revham/linalg.hpp"
#include "revham/poly.hpp"
#include "revham/poly_vector.hpp"

namespace revham {

/// The symplectic structure enters every computation through the Poisson
/// operator ("cosymplectic" matrix) W with X_f = W grad f and
/// {f,g} = grad f . W grad g. For a structure given as the Gram matrix K of
/// the 2-form, W = -K^{-1}; for the standard J and for every form arising
/// here, K^2 = -Id and the two coincide.
template <class K>
Mat<K> poisson_operator(const Mat<K>& form)
{
    return inverse(form).scaled(-field<K>::one());
}

template <class K>
PolyVector<K> gradient(const Poly<K>& f)
{
    PolyVector<K> g(f.dim(), f.dim());
    for (int i = 0; i < f.dim(); ++i)
        g[i] = partial(f, i);
    return g;
}

/// X_H = W grad H for a Poisson operator W (antisymmetric, invertible).
template <class K>
PolyVector<K> hamiltonian_vector_field(const Poly<K>& H, const Mat<K>& W)
{
    if (W.rows() != H.dim() || W.cols() != H.dim())
        throw poly_error("hamiltonian_vector_field: structure dimension mismatch");
    PolyVector<K> X(H.dim(), H.dim());
    for (int i = 0; i < H.dim(); ++i)
        for (int j = 0; j < H.dim(); ++j)
            if (!field<K>::is_zero(W(i, j)))
                X[i] += partial(H, j).scaled(W(i, j));
    return X;
}

/// {f,g} = grad f . W grad g. Bilinear, antisymmetric; for homogeneous
/// inputs of degrees i, j the result is homogeneous of degree i+j-2.
template <class K>
Poly<K> poisson_bracket(const Poly<K>& f, const Poly<K>& g, const Mat<K>& W, const TruncContext& ctx)
{
    f.require_same_dim(g);
    if (W.rows() != f.dim() || W.cols() != f.dim())
        throw poly_error("poisson_bracket: structure dimension mismatch");
    Poly<K> r(f.dim());
    for (int i = 0; i < f.dim(); ++i) {
        Poly<K> fi = partial(f, i);
        if (fi.is_zero())
            continue;
        for (int j = 0; j < f.dim(); ++j) {
            if (field<K>::is_zero(W(i, j)))
                continue;
            Poly<K> gj = partial(g, j);
            if (gj.is_zero())
                continue;
            r += mul(fi, gj, ctx).scaled(W(i, j));
        }
    }
    return r;
}

/// f o R for a linear map R.
template <class K>
Poly<K> compose_linear(const Poly<K>& f, const Mat<K>& R, const TruncContext& ctx)
{
    return substitute_linear(f, R.row_major(), ctx);
}

/// H is R-anti-invariant when H o R = -H. Returns the offending part
/// H o R + H (zero iff anti-invariant).
template <class K>
Poly<K> anti_invariance_defect(const Poly<K>& H, const Mat<K>& R, const TruncContext& ctx)
{
    return compose_linear(H, R, ctx) + H;
}

/// X is R-reversible when X(Rx) = -R X(x). Returns X o R + R X.
template <class K>
PolyVector<K> reversibility_defect(const PolyVector<K>& X, const Mat<K>& R, const TruncContext& ctx)
{
    PolyVector<K> XR(X.size(), X.vars());
    auto rows = R.row_major();
    for (int i = 0; i < X.size(); ++i)
        XR[i] = substitute_linear(X[i], rows, ctx);
    return XR + matrix_apply(R, X);
}

/// Equivariance defect X o R - R X (zero iff the field commutes with R).
template <class K>
PolyVector<K> equivariance_defect(const PolyVector<K>& X, const Mat<K>& R, const TruncContext& ctx)
{
    PolyVector<K> XR(X.size(), X.vars());
    auto rows = R.row_major();
    for (int i = 0; i < X.size(); ++i)
        XR[i] = substitute_linear(X[i], rows, ctx);
    return XR - matrix_apply(R, X);
}

/// Belitskii commutation defect A^T h(x) - h'(x) A^T x.
template <class K>
PolyVector<K> belitskii_defect(const PolyVector<K>& h, const Mat<K>& A, const TruncContext& ctx)
{
    Mat<K> At = A.transposed();
    return matrix_apply(At, h) - apply_jacobian(h, linear_field(At), ctx);
}

} // namespace revham
