#pragma once

#include "revham/monomial.hpp"
#include "revham/scalar.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>
#include <vector>

namespace revham {

struct poly_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Truncation order is a property of the computation, not of values:
/// every product is cut at `order` and quietly records that it did so.
struct TruncContext {
    int order;
    mutable bool truncated = false;

    explicit TruncContext(int n) : order(n) {}
    void note_truncation() const { truncated = true; }
};

/// Sparse multivariate polynomial over K (exact rational or double),
/// graded by total degree. No zero coefficients are ever stored.
template <class K>
class Poly {
public:
    using coeff_map = std::map<Monomial, K, GrlexLess>;

    explicit Poly(int dim = 0) : dim_(dim) {}

    static Poly zero(int dim) { return Poly(dim); }

    static Poly constant(int dim, const K& c)
    {
        Poly p(dim);
        p.add_term(Monomial(dim), c);
        return p;
    }

    static Poly variable(int dim, int i)
    {
        if (i < 0 || i >= dim)
            throw poly_error("variable index out of range");
        Poly p(dim);
        Monomial m(dim);
        m.e[i] = 1;
        p.add_term(m, field<K>::one());
        return p;
    }

    int dim() const { return dim_; }
    bool is_zero() const { return terms_.empty(); }
    std::size_t term_count() const { return terms_.size(); }
    const coeff_map& terms() const { return terms_; }

    int degree() const
    {
        int d = 0;
        for (const auto& [m, c] : terms_)
            d = std::max(d, m.degree());
        return d;
    }

    K coefficient(const Monomial& m) const
    {
        auto it = terms_.find(m);
        return it == terms_.end() ? field<K>::zero() : it->second;
    }

    void add_term(const Monomial& m, const K& c)
    {
        if (m.dim != dim_)
            throw poly_error("monomial dimension mismatch");
        field<K>::check_admissible(c);
        auto [it, inserted] = terms_.try_emplace(m, c);
        if (!inserted) {
            it->second += c;
            field<K>::check_admissible(it->second);
            if (field<K>::is_zero(it->second))
                terms_.erase(it);
        } else if (field<K>::is_zero(c)) {
            terms_.erase(it);
        }
    }

    Poly& operator+=(const Poly& o)
    {
        require_same_dim(o);
        for (const auto& [m, c] : o.terms_)
            add_term(m, c);
        return *this;
    }

    Poly& operator-=(const Poly& o)
    {
        require_same_dim(o);
        for (const auto& [m, c] : o.terms_)
            add_term(m, -c);
        return *this;
    }

    friend Poly operator+(Poly a, const Poly& b) { return a += b; }
    friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

    Poly operator-() const
    {
        Poly r(dim_);
        for (const auto& [m, c] : terms_)
            r.terms_.emplace(m, -c);
        return r;
    }

    Poly scaled(const K& s) const
    {
        Poly r(dim_);
        if (field<K>::is_zero(s))
            return r;
        field<K>::check_admissible(s);
        for (const auto& [m, c] : terms_) {
            K v = c * s;
            field<K>::check_admissible(v);
            if (!field<K>::is_zero(v))
                r.terms_.emplace(m, v);
        }
        return r;
    }

    void require_same_dim(const Poly& o) const
    {
        if (dim_ != o.dim_)
            throw poly_error("polynomial dimension mismatch");
    }

private:
    int dim_;
    coeff_map terms_;
};

template <class K>
Poly<K> mul(const Poly<K>& a, const Poly<K>& b, const TruncContext& ctx)
{
    a.require_same_dim(b);
    Poly<K> r(a.dim());
    for (const auto& [ma, ca] : a.terms()) {
        int da = ma.degree();
        for (const auto& [mb, cb] : b.terms()) {
            if (da + mb.degree() > ctx.order) {
                ctx.note_truncation();
                continue;
            }
            Monomial m(a.dim());
            for (int i = 0; i < a.dim(); ++i)
                m.e[i] = static_cast<uint8_t>(ma.e[i] + mb.e[i]);
            r.add_term(m, ca * cb);
        }
    }
    return r;
}

template <class K>
Poly<K> pow(const Poly<K>& a, int k, const TruncContext& ctx)
{
    if (k < 0)
        throw poly_error("negative power on a polynomial");
    Poly<K> r = Poly<K>::constant(a.dim(), field<K>::one());
    Poly<K> base = a;
    while (k > 0) {
        if (k & 1)
            r = mul(r, base, ctx);
        k >>= 1;
        if (k)
            base = mul(base, base, ctx);
    }
    return r;
}

template <class K>
Poly<K> partial(const Poly<K>& f, int i)
{
    if (i < 0 || i >= f.dim())
        throw poly_error("partial: variable index out of range");
    Poly<K> r(f.dim());
    for (const auto& [m, c] : f.terms()) {
        if (m.e[i] == 0)
            continue;
        Monomial d = m;
        d.e[i] -= 1;
        r.add_term(d, c * field<K>::from_int(m.e[i]));
    }
    return r;
}

/// Homogeneous part of degree d.
template <class K>
Poly<K> grade(const Poly<K>& f, int d)
{
    Poly<K> r(f.dim());
    for (const auto& [m, c] : f.terms())
        if (m.degree() == d)
            r.add_term(m, c);
    return r;
}

/// Restrict a mixed-degree polynomial to degrees in [lo, hi].
template <class K>
Poly<K> grade_range(const Poly<K>& f, int lo, int hi)
{
    Poly<K> r(f.dim());
    for (const auto& [m, c] : f.terms()) {
        int d = m.degree();
        if (d >= lo && d <= hi)
            r.add_term(m, c);
    }
    return r;
}

/// f(Mx) for a square matrix M given as row-major entries.
template <class K>
Poly<K> substitute_linear(const Poly<K>& f, const std::vector<std::vector<K>>& M, const TruncContext& ctx)
{
    int n = f.dim();
    if (static_cast<int>(M.size()) != n)
        throw poly_error("substitute_linear: matrix size mismatch");
    std::vector<Poly<K>> rows;
    rows.reserve(n);
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(M[i].size()) != n)
            throw poly_error("substitute_linear: matrix size mismatch");
        Poly<K> li(n);
        for (int j = 0; j < n; ++j)
            if (!field<K>::is_zero(M[i][j]))
                li += Poly<K>::variable(n, j).scaled(M[i][j]);
        rows.push_back(std::move(li));
    }
    Poly<K> r(n);
    for (const auto& [m, c] : f.terms()) {
        Poly<K> t = Poly<K>::constant(n, c);
        for (int i = 0; i < n; ++i)
            if (m.e[i] > 0)
                t = mul(t, pow(rows[i], m.e[i], ctx), ctx);
        r += t;
    }
    return r;
}

/// Substitute zero for every variable with mask[i] == false.
template <class K>
Poly<K> substitute_zero(const Poly<K>& f, const std::vector<bool>& keep)
{
    if (static_cast<int>(keep.size()) != f.dim())
        throw poly_error("substitute_zero: mask size mismatch");
    Poly<K> r(f.dim());
    for (const auto& [m, c] : f.terms()) {
        bool killed = false;
        for (int i = 0; i < f.dim(); ++i)
            if (!keep[i] && m.e[i] > 0) {
                killed = true;
                break;
            }
        if (!killed)
            r.add_term(m, c);
    }
    return r;
}

/// Exact division by the single variable x_i; requires every term divisible.
template <class K>
Poly<K> divide_by_variable(const Poly<K>& f, int i)
{
    Poly<K> r(f.dim());
    for (const auto& [m, c] : f.terms()) {
        if (m.e[i] == 0)
            throw poly_error("divide_by_variable: term not divisible by " + variable_name(i, f.dim()));
        Monomial d = m;
        d.e[i] -= 1;
        r.add_term(d, c);
    }
    return r;
}

template <class K>
K eval(const Poly<K>& f, const std::vector<K>& x)
{
    if (static_cast<int>(x.size()) != f.dim())
        throw poly_error("eval: point dimension mismatch");
    K acc = field<K>::zero();
    for (const auto& [m, c] : f.terms()) {
        K t = c;
        for (int i = 0; i < f.dim(); ++i)
            for (int k = 0; k < m.e[i]; ++k)
                t *= x[i];
        acc += t;
    }
    return acc;
}

/// Embed into a larger variable set (new trailing variables unused).
template <class K>
Poly<K> extend_dim(const Poly<K>& f, int new_dim)
{
    if (new_dim < f.dim())
        throw poly_error("extend_dim: cannot shrink");
    Poly<K> r(new_dim);
    for (const auto& [m, c] : f.terms()) {
        Monomial mm(new_dim);
        for (int i = 0; i < f.dim(); ++i)
            mm.e[i] = m.e[i];
        r.add_term(mm, c);
    }
    return r;
}

template <class K>
Poly<double> to_double_poly(const Poly<K>& f)
{
    Poly<double> r(f.dim());
    for (const auto& [m, c] : f.terms())
        r.add_term(m, field<K>::to_double(c));
    return r;
}

template <class K>
double max_coeff_abs(const Poly<K>& f)
{
    double m = 0;
    for (const auto& [mono, c] : f.terms())
        m = std::max(m, std::fabs(field<K>::to_double(c)));
    return m;
}

/// Canonical text form: signed sum of coeff*monomial in graded-lex order.
template <class K>
std::string to_string(const Poly<K>& f)
{
    if (f.is_zero())
        return "0";
    std::string s;
    for (const auto& [m, c] : f.terms()) {
        std::string cs = field<K>::str(c);
        bool neg = !cs.empty() && cs[0] == '-';
        if (s.empty())
            s += neg ? "-" : "";
        else
            s += neg ? " - " : " + ";
        if (neg)
            cs = cs.substr(1);
        if (m.degree() == 0)
            s += cs;
        else if (cs == "1")
            s += to_string(m);
        else
            s += cs + "*" + to_string(m);
    }
    return s;
}

} // namespace revham
