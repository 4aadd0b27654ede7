#pragma once

#include "revham/canonical.hpp"
#include "revham/hamilton.hpp"

#include <map>
#include <vector>

namespace revham {

struct normal_form_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One basis element of a graded (scalar or vector) polynomial space:
/// comp == -1 means the scalar monomial m, otherwise m * e_comp.
struct BasisElem {
    Monomial m;
    int comp = -1;

    bool operator==(const BasisElem& o) const { return comp == o.comp && m == o.m; }
    bool operator<(const BasisElem& o) const
    {
        if (comp != o.comp)
            return comp < o.comp;
        return GrlexLess{}(m, o.m);
    }
};

/// Monomial basis of H_d^{parity}: scalar monomials m with sign(m o Rhat) = parity.
inline std::vector<BasisElem> hamiltonian_basis(int n, int d, const std::vector<int>& signs, int parity)
{
    std::vector<BasisElem> out;
    for (const auto& m : monomial_basis(n, d))
        if (monomial_parity(m, signs) == parity)
            out.push_back({m, -1});
    return out;
}

/// Vector-monomial basis of degree-d fields with fixed equivariance type:
/// type +1 (equivariant, X o R = R X) requires s_comp * sign(m) = +1,
/// type -1 (reversible) requires s_comp * sign(m) = -1.
inline std::vector<BasisElem> field_basis(int n, int d, const std::vector<int>& signs, int type)
{
    std::vector<BasisElem> out;
    for (int c = 0; c < n; ++c)
        for (const auto& m : monomial_basis(n, d))
            if (signs[c] * monomial_parity(m, signs) == type)
                out.push_back({m, c});
    return out;
}

template <class K>
std::vector<K> to_coords(const Poly<K>& p, const std::vector<BasisElem>& basis)
{
    std::map<Monomial, int, GrlexLess> index;
    for (size_t i = 0; i < basis.size(); ++i)
        index.emplace(basis[i].m, static_cast<int>(i));
    std::vector<K> out(basis.size(), field<K>::zero());
    for (const auto& [m, c] : p.terms()) {
        auto it = index.find(m);
        if (it == index.end())
            throw normal_form_error("polynomial has a term outside the graded basis: " + to_string(m));
        out[it->second] = c;
    }
    return out;
}

template <class K>
std::vector<K> to_coords(const PolyVector<K>& v, const std::vector<BasisElem>& basis)
{
    std::map<std::pair<int, Monomial>, int,
             decltype([](const auto& a, const auto& b) {
                 if (a.first != b.first)
                     return a.first < b.first;
                 return GrlexLess{}(a.second, b.second);
             })>
        index;
    for (size_t i = 0; i < basis.size(); ++i)
        index.emplace(std::pair{basis[i].comp, basis[i].m}, static_cast<int>(i));
    std::vector<K> out(basis.size(), field<K>::zero());
    for (int c = 0; c < v.size(); ++c)
        for (const auto& [m, coef] : v[c].terms()) {
            auto it = index.find({c, m});
            if (it == index.end())
                throw normal_form_error("field has a term outside the graded basis: component "
                                        + std::to_string(c) + ", " + to_string(m));
            out[it->second] = coef;
        }
    return out;
}

template <class K>
Poly<K> poly_from_coords(const std::vector<K>& x, const std::vector<BasisElem>& basis, int n)
{
    Poly<K> p(n);
    for (size_t i = 0; i < basis.size(); ++i)
        if (!field<K>::is_zero(x[i]))
            p.add_term(basis[i].m, x[i]);
    return p;
}

template <class K>
PolyVector<K> field_from_coords(const std::vector<K>& x, const std::vector<BasisElem>& basis, int n)
{
    PolyVector<K> v(n, n);
    for (size_t i = 0; i < basis.size(); ++i)
        if (!field<K>::is_zero(x[i]))
            v[basis[i].comp].add_term(basis[i].m, x[i]);
    return v;
}

/// A graded linear operator between parity subspaces at one degree.
template <class K>
struct GradedOperator {
    int degree = 0;
    int domain_parity = 0; // +-1 (Hamiltonian parity, or equivariance type for fields)
    bool on_fields = false;
    std::vector<BasisElem> domain, target;
    Mat<K> M; // |target| x |domain|
};

/// Matrix of Ad_{H2} = {H2, .} on the degree-d monomials of the requested
/// parity. The operator maps H^+- into H^-+ (enforced structurally: images are
/// expanded in the opposite-parity basis and stray terms throw).
template <class K>
GradedOperator<K> ad_matrix(const Poly<K>& H2, int d, int parity, const Mat<K>& Jop,
                            const std::vector<int>& signs)
{
    if (grade(H2, 2).term_count() != H2.term_count() || H2.is_zero())
        throw normal_form_error("ad_matrix: H2 must be homogeneous quadratic");
    int n = H2.dim();
    GradedOperator<K> op;
    op.degree = d;
    op.domain_parity = parity;
    op.domain = hamiltonian_basis(n, d, signs, parity);
    op.target = hamiltonian_basis(n, d, signs, -parity);
    op.M = Mat<K>(static_cast<int>(op.target.size()), static_cast<int>(op.domain.size()));
    TruncContext ctx(d);
    for (size_t j = 0; j < op.domain.size(); ++j) {
        Poly<K> m(n);
        m.add_term(op.domain[j].m, field<K>::one());
        auto img = poisson_bracket(H2, m, Jop, ctx);
        auto col = to_coords(img, op.target);
        for (size_t i = 0; i < op.target.size(); ++i)
            op.M(static_cast<int>(i), static_cast<int>(j)) = col[i];
    }
    return op;
}

/// Matrix of the homological (Lie) operator ad_A(W) = DW.(Ax) - A W on
/// degree-d vector fields of the requested equivariance type.
template <class K>
GradedOperator<K> lie_operator_matrix(const Mat<K>& A, int d, int type, const std::vector<int>& signs)
{
    int n = A.rows();
    GradedOperator<K> op;
    op.degree = d;
    op.domain_parity = type;
    op.on_fields = true;
    op.domain = field_basis(n, d, signs, type);
    op.target = field_basis(n, d, signs, -type);
    op.M = Mat<K>(static_cast<int>(op.target.size()), static_cast<int>(op.domain.size()));
    TruncContext ctx(d);
    auto Ax = linear_field(A);
    for (size_t j = 0; j < op.domain.size(); ++j) {
        PolyVector<K> w(n, n);
        w[op.domain[j].comp].add_term(op.domain[j].m, field<K>::one());
        auto img = apply_jacobian(w, Ax, ctx) - matrix_apply(A, w);
        auto col = to_coords(img, op.target);
        for (size_t i = 0; i < op.target.size(); ++i)
            op.M(static_cast<int>(i), static_cast<int>(j)) = col[i];
    }
    return op;
}

/// Kernel/range data for one parity pair at one degree. `op` maps D -> T and
/// `mirror` maps T -> D; semisimplicity gives T = ker(mirror) + range(op) and
/// D = ker(op) + range(mirror), both verified.
template <class K>
struct KernelRangeSplit {
    std::vector<std::vector<K>> kernel; // basis of ker(op.M), domain coords
    std::vector<std::vector<K>> range;  // basis of range(op.M), target coords
    Mat<K> op_M, mirror_M;

    int domain_dim() const { return op_M.cols(); }
    int target_dim() const { return op_M.rows(); }
};

template <class K>
KernelRangeSplit<K> split_kernel_range(const GradedOperator<K>& op, const GradedOperator<K>& mirror)
{
    if (mirror.M.rows() != op.M.cols() || mirror.M.cols() != op.M.rows())
        throw normal_form_error("split_kernel_range: operators are not a parity pair");
    KernelRangeSplit<K> s;
    s.op_M = op.M;
    s.mirror_M = mirror.M;
    s.kernel = nullspace(op.M);
    s.range = column_space_basis(op.M);
    int rk = static_cast<int>(s.range.size());
    if (static_cast<int>(s.kernel.size()) + rk != op.M.cols())
        throw normal_form_error("rank-nullity bookkeeping failed"); // cannot happen over exact K
    // semisimple splitting of the target: ker(mirror) + range(op) = T
    int mirror_ker = mirror.M.cols() - rank(mirror.M);
    if (mirror_ker + rk != op.M.rows())
        throw normal_form_error("semisimplicity violated: kernel + range do not span the target space "
                                "(non-canonical linear part?)");
    return s;
}

/// Outcome of splitting b in T along ker(mirror) + range(op) and solving the
/// homological equation on the range part.
template <class K>
struct HomologicalSolution {
    std::vector<K> kernel_part; // in T coords
    std::vector<K> range_part;  // in T coords
    std::vector<K> preimage;    // in D coords; op(preimage) = range_part, preimage in range(mirror)
};

template <class K>
HomologicalSolution<K> homological_solve(const GradedOperator<K>& op, const GradedOperator<K>& mirror,
                                         const std::vector<K>& b)
{
    auto s = split_kernel_range(mirror, op); // kernel of mirror (in T), range of mirror (in D)
    const auto& kerT = s.kernel;
    int tdim = op.M.rows();
    int ddim = op.M.cols();
    if (static_cast<int>(b.size()) != tdim)
        throw normal_form_error("homological_solve: rhs dimension mismatch");
    if (static_cast<int>(kerT.size()) + rank(op.M) != tdim)
        throw normal_form_error("semisimplicity violated: ker + range dimensions do not fill the target");

    // [ker(T) columns | op.M columns] (kappa; w) = b
    int kc = static_cast<int>(kerT.size());
    Mat<K> aug(tdim, kc + ddim);
    for (int i = 0; i < tdim; ++i) {
        for (int j = 0; j < kc; ++j)
            aug(i, j) = kerT[j][i];
        for (int j = 0; j < ddim; ++j)
            aug(i, kc + j) = op.M(i, j);
    }
    auto sol = solve(aug, b);
    if (!sol)
        throw normal_form_error("semisimple splitting failed: rhs not in kernel + range");

    HomologicalSolution<K> out;
    out.kernel_part.assign(tdim, field<K>::zero());
    for (int j = 0; j < kc; ++j)
        for (int i = 0; i < tdim; ++i)
            out.kernel_part[i] += (*sol)[j] * kerT[j][i];
    out.range_part.resize(tdim);
    for (int i = 0; i < tdim; ++i)
        out.range_part[i] = b[i] - out.kernel_part[i];

    // canonical preimage: solve (op.M * mirror.M) xi = range_part, preimage = mirror.M xi
    Mat<K> comp = op.M * mirror.M;
    auto xi = solve(comp, out.range_part);
    if (!xi)
        throw normal_form_error("homological equation unsolvable on the computed range part");
    out.preimage = mirror.M * *xi;

    // verify, not assume
    auto chk = op.M * out.preimage;
    for (int i = 0; i < tdim; ++i) {
        K diff = chk[i] - out.range_part[i];
        if (field<K>::exact ? !field<K>::is_zero(diff)
                            : std::fabs(field<K>::to_double(diff)) > 1e-8)
            throw normal_form_error("homological solution verification failed");
    }
    return out;
}

} // namespace revham
