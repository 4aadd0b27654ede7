#pragma once

#include "revham/linalg.hpp"
#include "revham/poly.hpp"

#include <vector>

namespace revham {

/// n polynomials in a shared variable set; a polynomial map R^vars -> R^n.
/// Components may live in more variables than n (the reduced map B adds sigma).
template <class K>
class PolyVector {
public:
    PolyVector() = default;
    PolyVector(int components, int vars) : comps_(components, Poly<K>(vars)) {}
    explicit PolyVector(std::vector<Poly<K>> comps) : comps_(std::move(comps))
    {
        for (const auto& c : comps_)
            if (c.dim() != comps_.front().dim())
                throw poly_error("PolyVector components must share a variable set");
    }

    int size() const { return static_cast<int>(comps_.size()); }
    int vars() const { return comps_.empty() ? 0 : comps_.front().dim(); }

    Poly<K>& operator[](int i) { return comps_[i]; }
    const Poly<K>& operator[](int i) const { return comps_[i]; }

    bool is_zero() const
    {
        for (const auto& c : comps_)
            if (!c.is_zero())
                return false;
        return true;
    }

    int degree() const
    {
        int d = 0;
        for (const auto& c : comps_)
            d = std::max(d, c.degree());
        return d;
    }

    PolyVector& operator+=(const PolyVector& o)
    {
        require_same_shape(o);
        for (int i = 0; i < size(); ++i)
            comps_[i] += o.comps_[i];
        return *this;
    }

    PolyVector& operator-=(const PolyVector& o)
    {
        require_same_shape(o);
        for (int i = 0; i < size(); ++i)
            comps_[i] -= o.comps_[i];
        return *this;
    }

    friend PolyVector operator+(PolyVector a, const PolyVector& b) { return a += b; }
    friend PolyVector operator-(PolyVector a, const PolyVector& b) { return a -= b; }

    PolyVector scaled(const K& s) const
    {
        PolyVector r = *this;
        for (auto& c : r.comps_)
            c = c.scaled(s);
        return r;
    }

    void require_same_shape(const PolyVector& o) const
    {
        if (size() != o.size() || vars() != o.vars())
            throw poly_error("PolyVector shape mismatch");
    }

private:
    std::vector<Poly<K>> comps_;
};

template <class K>
PolyVector<K> grade(const PolyVector<K>& v, int d)
{
    PolyVector<K> r(v.size(), v.vars());
    for (int i = 0; i < v.size(); ++i)
        r[i] = grade(v[i], d);
    return r;
}

template <class K>
PolyVector<K> grade_range(const PolyVector<K>& v, int lo, int hi)
{
    PolyVector<K> r(v.size(), v.vars());
    for (int i = 0; i < v.size(); ++i)
        r[i] = grade_range(v[i], lo, hi);
    return r;
}

/// Linear vector field x -> A x as a PolyVector.
template <class K>
PolyVector<K> linear_field(const Mat<K>& A)
{
    PolyVector<K> r(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            if (!field<K>::is_zero(A(i, j)))
                r[i] += Poly<K>::variable(A.cols(), j).scaled(A(i, j));
    return r;
}

/// Linear part of a polynomial map, as a matrix.
template <class K>
Mat<K> linear_part(const PolyVector<K>& v)
{
    Mat<K> A(v.size(), v.vars());
    for (int i = 0; i < v.size(); ++i) {
        Poly<K> lin = grade(v[i], 1);
        for (const auto& [m, c] : lin.terms())
            for (int j = 0; j < v.vars(); ++j)
                if (m.e[j] == 1)
                    A(i, j) = c;
    }
    return A;
}

template <class K>
std::vector<K> eval(const PolyVector<K>& v, const std::vector<K>& x)
{
    std::vector<K> out(v.size(), field<K>::zero());
    for (int i = 0; i < v.size(); ++i)
        out[i] = eval(v[i], x);
    return out;
}

/// df/dx_j matrix of polynomials.
template <class K>
std::vector<std::vector<Poly<K>>> jacobian(const PolyVector<K>& v)
{
    std::vector<std::vector<Poly<K>>> J(v.size());
    for (int i = 0; i < v.size(); ++i) {
        J[i].reserve(v.vars());
        for (int j = 0; j < v.vars(); ++j)
            J[i].push_back(partial(v[i], j));
    }
    return J;
}

/// Directional derivative Df . w (rows of Df contracted against the map w).
template <class K>
PolyVector<K> apply_jacobian(const PolyVector<K>& f, const PolyVector<K>& w, const TruncContext& ctx)
{
    if (f.vars() != w.vars() || w.size() != f.vars())
        throw poly_error("apply_jacobian shape mismatch");
    PolyVector<K> r(f.size(), f.vars());
    for (int i = 0; i < f.size(); ++i)
        for (int j = 0; j < f.vars(); ++j) {
            Poly<K> pij = partial(f[i], j);
            if (!pij.is_zero() && !w[j].is_zero())
                r[i] += mul(pij, w[j], ctx);
        }
    return r;
}

/// Lie bracket [u, v] = Dv.u - Du.v.
template <class K>
PolyVector<K> lie_bracket(const PolyVector<K>& u, const PolyVector<K>& v, const TruncContext& ctx)
{
    return apply_jacobian(v, u, ctx) - apply_jacobian(u, v, ctx);
}

template <class K>
PolyVector<K> matrix_apply(const Mat<K>& A, const PolyVector<K>& v)
{
    if (A.cols() != v.size())
        throw poly_error("matrix_apply shape mismatch");
    PolyVector<K> r(A.rows(), v.vars());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            if (!field<K>::is_zero(A(i, j)))
                r[i] += v[j].scaled(A(i, j));
    return r;
}

template <class K>
PolyVector<K> substitute_linear(const PolyVector<K>& v, const std::vector<std::vector<K>>& M, const TruncContext& ctx)
{
    PolyVector<K> r(v.size(), v.vars());
    for (int i = 0; i < v.size(); ++i)
        r[i] = substitute_linear(v[i], M, ctx);
    return r;
}

template <class K>
PolyVector<double> to_double_field(const PolyVector<K>& v)
{
    std::vector<Poly<double>> comps;
    comps.reserve(v.size());
    for (int i = 0; i < v.size(); ++i)
        comps.push_back(to_double_poly(v[i]));
    return PolyVector<double>(std::move(comps));
}

template <class K>
double max_coeff_abs(const PolyVector<K>& v)
{
    double m = 0;
    for (int i = 0; i < v.size(); ++i)
        for (const auto& [mono, c] : v[i].terms())
            m = std::max(m, std::fabs(field<K>::to_double(c)));
    return m;
}

} // namespace revham
