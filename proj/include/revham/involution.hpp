#pragma once

#include "revham/linalg.hpp"

#include <string>
#include <vector>

namespace revham {

struct involution_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

template <class K>
Mat<K> standard_symplectic(int n)
{
    Mat<K> J(n, n);
    for (int k = 0; k < n / 2; ++k) {
        J(2 * k, 2 * k + 1) = field<K>::one();
        J(2 * k + 1, 2 * k) = -field<K>::one();
    }
    return J;
}

template <class K>
double involution_defect(const Mat<K>& R)
{
    return (R * R - Mat<K>::identity(R.rows())).max_abs();
}

/// JR = R^T J  (linear symplectic involution condition).
template <class K>
double symplectic_defect(const Mat<K>& R, const Mat<K>& J)
{
    return (J * R - R.transposed() * J).max_abs();
}

template <class K>
void require_involution(const Mat<K>& R, double tol = 1e-12)
{
    if (R.rows() != R.cols())
        throw involution_error("involution matrix must be square");
    double d = involution_defect(R);
    if (field<K>::exact ? d != 0.0 : d > tol)
        throw involution_error("matrix is not an involution (||R^2 - I|| = " + std::to_string(d) + ")");
}

/// Basis of the column space of M, as vectors.
template <class K>
std::vector<std::vector<K>> column_space_basis(const Mat<K>& M)
{
    Mat<K> t = M.transposed();
    auto pivots = detail::echelonize(t);
    std::vector<std::vector<K>> basis;
    for (int i = 0; i < static_cast<int>(pivots.size()); ++i) {
        std::vector<K> v(t.cols(), field<K>::zero());
        for (int j = 0; j < t.cols(); ++j)
            v[j] = t(i, j);
        basis.push_back(std::move(v));
    }
    return basis;
}

template <class K>
struct FixDecomposition {
    std::vector<std::vector<K>> fix;     // basis of Fix(R)  = Im (I+R)/2
    std::vector<std::vector<K>> antifix; // basis of Fix(-R) = Im (I-R)/2
    double cross_omega_residual = 0.0;   // max |omega(fix_i, antifix_j)|
};

template <class K>
K omega_pairing(const Mat<K>& J, const std::vector<K>& u, const std::vector<K>& v)
{
    K s = field<K>::zero();
    for (int i = 0; i < J.rows(); ++i)
        for (int j = 0; j < J.cols(); ++j)
            if (!field<K>::is_zero(J(i, j)))
                s += u[i] * J(i, j) * v[j];
    return s;
}

/// Splitting R^n = Fix(R) + Fix(-R) via the projectors (I +- R)/2. When J is
/// supplied and R is J-symplectic, omega vanishes between the two pieces;
/// the residual is recorded.
template <class K>
FixDecomposition<K> fix_decompose(const Mat<K>& R, const Mat<K>* J = nullptr)
{
    require_involution(R);
    int n = R.rows();
    Mat<K> I = Mat<K>::identity(n);
    K half = field<K>::one() / field<K>::from_int(2);
    FixDecomposition<K> out;
    out.fix = column_space_basis((I + R).scaled(half));
    out.antifix = column_space_basis((I - R).scaled(half));
    if (static_cast<int>(out.fix.size() + out.antifix.size()) != n)
        throw involution_error("fix/antifix dimensions do not sum to n");
    if (J) {
        for (const auto& u : out.fix)
            for (const auto& v : out.antifix)
                out.cross_omega_residual = std::max(out.cross_omega_residual,
                                                    std::fabs(field<K>::to_double(omega_pairing(*J, u, v))));
    }
    return out;
}

namespace detail {

/// Darboux basis (u1,v1,u2,v2,...) of the span of `basis`, with
/// omega(u_k, v_k) = 1 and all other pairings zero. Fails iff omega is
/// degenerate on the subspace (Lemma-2.3 violation for involution inputs).
template <class K>
std::vector<std::vector<K>> darboux_basis(std::vector<std::vector<K>> basis, const Mat<K>& J)
{
    std::vector<std::vector<K>> out;
    auto sub = [](std::vector<K> a, const std::vector<K>& b, const K& f) {
        for (size_t i = 0; i < a.size(); ++i)
            a[i] -= f * b[i];
        return a;
    };
    while (!basis.empty()) {
        std::vector<K> u = basis.front();
        basis.erase(basis.begin());
        int pick = -1;
        double best = 0;
        for (size_t i = 0; i < basis.size(); ++i) {
            double w = std::fabs(field<K>::to_double(omega_pairing(J, u, basis[i])));
            if constexpr (field<K>::exact) {
                if (w != 0) {
                    pick = static_cast<int>(i);
                    break;
                }
            } else if (w > best) {
                best = w;
                pick = static_cast<int>(i);
            }
        }
        if (pick < 0)
            throw involution_error("omega degenerate on a fixed subspace");
        K w = omega_pairing(J, u, basis[pick]);
        std::vector<K> v = basis[pick];
        for (auto& x : v)
            x /= w;
        basis.erase(basis.begin() + pick);
        for (auto& b : basis) {
            b = sub(b, u, omega_pairing(J, b, v) / omega_pairing(J, u, v));
            b = sub(b, v, omega_pairing(J, b, u) / omega_pairing(J, v, u));
        }
        out.push_back(std::move(u));
        out.push_back(std::move(v));
    }
    return out;
}

} // namespace detail

/// Proposition-1 template with the given Fix dimension, in coordinates
/// (x1,y1,...): +1 blocks first, then -1 blocks.
template <class K>
Mat<K> involution_template(int n, int dim_fix)
{
    if (dim_fix % 2 != 0 || dim_fix < 0 || dim_fix > n)
        throw involution_error("no symplectic involution template with dim Fix = " + std::to_string(dim_fix));
    std::vector<K> d(n, field<K>::one());
    for (int i = dim_fix; i < n; ++i)
        d[i] = -field<K>::one();
    return Mat<K>::diag(d);
}

inline std::string involution_template_name(int n, int dim_fix)
{
    if (dim_fix == n)
        return "Id";
    if (dim_fix == 0)
        return "-Id";
    if (n == 4 && dim_fix == 2)
        return "R0";
    if (n == 6 && dim_fix == 2)
        return "R1";
    if (n == 6 && dim_fix == 4)
        return "R2";
    return "diag(+" + std::to_string(dim_fix) + ",-" + std::to_string(n - dim_fix) + ")";
}

template <class K>
struct InvolutionNormalForm {
    Mat<K> T;         // symplectic change of coordinates, T^{-1} R T = template
    Mat<K> canonical; // the Prop.-1 template reached
    int dim_fix = 0;
    std::string name;
    double symplectic_residual = 0; // ||T^T J T - J||
    double conjugation_residual = 0;
};

/// Bring a linear symplectic involution to its Proposition-1 normal form by
/// building Darboux bases on Fix(R) and Fix(-R) separately.
template <class K>
InvolutionNormalForm<K> involution_normal_form(const Mat<K>& R, const Mat<K>& J)
{
    require_involution(R);
    double sd = symplectic_defect(R, J);
    if (field<K>::exact ? sd != 0.0 : sd > 1e-9)
        throw involution_error("involution is not symplectic (||JR - R^T J|| = " + std::to_string(sd) + ")");
    int n = R.rows();
    auto parts = fix_decompose(R, &J);
    auto fix_pairs = detail::darboux_basis(parts.fix, J);
    auto anti_pairs = detail::darboux_basis(parts.antifix, J);

    Mat<K> T(n, n);
    int col = 0;
    for (const auto& v : fix_pairs) {
        for (int i = 0; i < n; ++i)
            T(i, col) = v[i];
        ++col;
    }
    for (const auto& v : anti_pairs) {
        for (int i = 0; i < n; ++i)
            T(i, col) = v[i];
        ++col;
    }

    InvolutionNormalForm<K> out;
    out.dim_fix = static_cast<int>(parts.fix.size());
    out.T = T;
    out.canonical = involution_template<K>(n, out.dim_fix);
    out.name = involution_template_name(n, out.dim_fix);
    out.symplectic_residual = (T.transposed() * J * T - J).max_abs();
    out.conjugation_residual = (inverse(T) * R * T - out.canonical).max_abs();
    return out;
}

} // namespace revham
