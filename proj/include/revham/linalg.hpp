#pragma once

#include "revham/scalar.hpp"

#include <cmath>
#include <optional>
#include <stdexcept>
#include <vector>

namespace revham {

struct linalg_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Dense matrix over K. Sized for this problem domain: phase-space matrices
/// (n <= 7) and graded-operator matrices (a few hundred square at most), all
/// solved by Gaussian elimination — exact over Rat, partially pivoted over double.
template <class K>
class Mat {
public:
    Mat() = default;
    Mat(int r, int c) : rows_(r), cols_(c), a_(static_cast<size_t>(r) * c, field<K>::zero()) {}

    static Mat identity(int n)
    {
        Mat m(n, n);
        for (int i = 0; i < n; ++i)
            m(i, i) = field<K>::one();
        return m;
    }

    static Mat diag(const std::vector<K>& d)
    {
        Mat m(static_cast<int>(d.size()), static_cast<int>(d.size()));
        for (size_t i = 0; i < d.size(); ++i)
            m(static_cast<int>(i), static_cast<int>(i)) = d[i];
        return m;
    }

    static Mat from_rows(const std::vector<std::vector<K>>& rows)
    {
        if (rows.empty())
            return Mat(0, 0);
        Mat m(static_cast<int>(rows.size()), static_cast<int>(rows[0].size()));
        for (int i = 0; i < m.rows_; ++i) {
            if (static_cast<int>(rows[i].size()) != m.cols_)
                throw linalg_error("ragged row list");
            for (int j = 0; j < m.cols_; ++j)
                m(i, j) = rows[i][j];
        }
        return m;
    }

    int rows() const { return rows_; }
    int cols() const { return cols_; }

    K& operator()(int i, int j) { return a_[static_cast<size_t>(i) * cols_ + j]; }
    const K& operator()(int i, int j) const { return a_[static_cast<size_t>(i) * cols_ + j]; }

    std::vector<std::vector<K>> row_major() const
    {
        std::vector<std::vector<K>> out(rows_, std::vector<K>(cols_));
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                out[i][j] = (*this)(i, j);
        return out;
    }

    Mat transposed() const
    {
        Mat t(cols_, rows_);
        for (int i = 0; i < rows_; ++i)
            for (int j = 0; j < cols_; ++j)
                t(j, i) = (*this)(i, j);
        return t;
    }

    friend Mat operator*(const Mat& a, const Mat& b)
    {
        if (a.cols_ != b.rows_)
            throw linalg_error("matrix product shape mismatch");
        Mat c(a.rows_, b.cols_);
        for (int i = 0; i < a.rows_; ++i)
            for (int k = 0; k < a.cols_; ++k) {
                const K& aik = a(i, k);
                if (field<K>::is_zero(aik))
                    continue;
                for (int j = 0; j < b.cols_; ++j)
                    c(i, j) += aik * b(k, j);
            }
        return c;
    }

    friend std::vector<K> operator*(const Mat& a, const std::vector<K>& x)
    {
        if (a.cols_ != static_cast<int>(x.size()))
            throw linalg_error("matrix-vector shape mismatch");
        std::vector<K> y(a.rows_, field<K>::zero());
        for (int i = 0; i < a.rows_; ++i)
            for (int j = 0; j < a.cols_; ++j)
                y[i] += a(i, j) * x[j];
        return y;
    }

    friend Mat operator+(const Mat& a, const Mat& b)
    {
        a.require_same_shape(b);
        Mat c = a;
        for (size_t i = 0; i < c.a_.size(); ++i)
            c.a_[i] += b.a_[i];
        return c;
    }

    friend Mat operator-(const Mat& a, const Mat& b)
    {
        a.require_same_shape(b);
        Mat c = a;
        for (size_t i = 0; i < c.a_.size(); ++i)
            c.a_[i] -= b.a_[i];
        return c;
    }

    Mat scaled(const K& s) const
    {
        Mat c = *this;
        for (auto& v : c.a_)
            v *= s;
        return c;
    }

    bool operator==(const Mat& o) const { return rows_ == o.rows_ && cols_ == o.cols_ && a_ == o.a_; }

    void require_same_shape(const Mat& o) const
    {
        if (rows_ != o.rows_ || cols_ != o.cols_)
            throw linalg_error("matrix shape mismatch");
    }

    double max_abs() const
    {
        double m = 0;
        for (const auto& v : a_)
            m = std::max(m, std::fabs(field<K>::to_double(v)));
        return m;
    }

private:
    int rows_ = 0, cols_ = 0;
    std::vector<K> a_;
};

namespace detail {

/// Row-echelon elimination in place; returns pivot columns. Partial pivoting
/// by magnitude for double, first-nonzero for exact K.
template <class K>
std::vector<int> echelonize(Mat<K>& m)
{
    std::vector<int> pivots;
    int r = 0;
    for (int c = 0; c < m.cols() && r < m.rows(); ++c) {
        int best = -1;
        if constexpr (field<K>::exact) {
            for (int i = r; i < m.rows(); ++i)
                if (!field<K>::is_zero(m(i, c))) {
                    best = i;
                    break;
                }
        } else {
            double bv = 0;
            for (int i = r; i < m.rows(); ++i) {
                double v = std::fabs(field<K>::to_double(m(i, c)));
                if (v > bv) {
                    bv = v;
                    best = i;
                }
            }
            if (best >= 0 && bv < 1e-12)
                best = -1;
        }
        if (best < 0)
            continue;
        if (best != r)
            for (int j = 0; j < m.cols(); ++j)
                std::swap(m(best, j), m(r, j));
        K inv_p = field<K>::one() / m(r, c);
        for (int j = c; j < m.cols(); ++j)
            m(r, j) *= inv_p;
        for (int i = 0; i < m.rows(); ++i) {
            if (i == r || field<K>::is_zero(m(i, c)))
                continue;
            K f = m(i, c);
            for (int j = c; j < m.cols(); ++j)
                m(i, j) -= f * m(r, j);
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

} // namespace detail

template <class K>
int rank(Mat<K> m)
{
    return static_cast<int>(detail::echelonize(m).size());
}

/// Basis of the null space, one vector per non-pivot column.
template <class K>
std::vector<std::vector<K>> nullspace(Mat<K> m)
{
    int n = m.cols();
    auto pivots = detail::echelonize(m);
    std::vector<bool> is_pivot(n, false);
    for (int c : pivots)
        is_pivot[c] = true;
    std::vector<std::vector<K>> basis;
    for (int c = 0; c < n; ++c) {
        if (is_pivot[c])
            continue;
        std::vector<K> v(n, field<K>::zero());
        v[c] = field<K>::one();
        for (size_t r = 0; r < pivots.size(); ++r)
            v[pivots[r]] = -m(static_cast<int>(r), c);
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Particular solution of A x = b, or nullopt if inconsistent. Free variables
/// are set to zero (so the answer is deterministic for a fixed column order).
template <class K>
std::optional<std::vector<K>> solve(const Mat<K>& A, const std::vector<K>& b)
{
    if (A.rows() != static_cast<int>(b.size()))
        throw linalg_error("solve: rhs size mismatch");
    Mat<K> aug(A.rows(), A.cols() + 1);
    for (int i = 0; i < A.rows(); ++i) {
        for (int j = 0; j < A.cols(); ++j)
            aug(i, j) = A(i, j);
        aug(i, A.cols()) = b[i];
    }
    auto pivots = detail::echelonize(aug);
    if (!pivots.empty() && pivots.back() == A.cols())
        return std::nullopt; // pivot in the rhs column
    std::vector<K> x(A.cols(), field<K>::zero());
    for (size_t r = 0; r < pivots.size(); ++r)
        x[pivots[r]] = aug(static_cast<int>(r), A.cols());
    if constexpr (!field<K>::exact) {
        // reject numerically inconsistent systems
        auto res = A * x;
        double scale = std::max(1.0, A.max_abs());
        for (int i = 0; i < A.rows(); ++i)
            if (std::fabs(res[i] - b[i]) > 1e-8 * scale)
                return std::nullopt;
    }
    return x;
}

template <class K>
Mat<K> inverse(const Mat<K>& A)
{
    if (A.rows() != A.cols())
        throw linalg_error("inverse of non-square matrix");
    int n = A.rows();
    Mat<K> aug(n, 2 * n);
    for (int i = 0; i < n; ++i) {
        for (int j = 0; j < n; ++j)
            aug(i, j) = A(i, j);
        aug(i, n + i) = field<K>::one();
    }
    auto pivots = detail::echelonize(aug);
    if (static_cast<int>(pivots.size()) < n || pivots[n - 1] != n - 1)
        throw linalg_error("singular matrix");
    Mat<K> inv(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            inv(i, j) = aug(i, n + j);
    return inv;
}

/// Characteristic polynomial coefficients [c0..cn] with
/// det(lambda I - A) = lambda^n + c_{n-1} lambda^{n-1} + ... + c0,
/// by the Faddeev–LeVerrier recurrence (exact over Rat).
template <class K>
std::vector<K> char_poly(const Mat<K>& A)
{
    if (A.rows() != A.cols())
        throw linalg_error("char_poly of non-square matrix");
    int n = A.rows();
    std::vector<K> c(n + 1, field<K>::zero());
    c[n] = field<K>::one();
    Mat<K> M = Mat<K>::identity(n);
    for (int k = 1; k <= n; ++k) {
        M = A * M;
        K tr = field<K>::zero();
        for (int i = 0; i < n; ++i)
            tr += M(i, i);
        K ck = -tr / field<K>::from_int(k);
        c[n - k] = ck;
        for (int i = 0; i < n; ++i)
            M(i, i) += ck;
    }
    return c;
}

template <class K>
K trace(const Mat<K>& A)
{
    K t = field<K>::zero();
    for (int i = 0; i < std::min(A.rows(), A.cols()); ++i)
        t += A(i, i);
    return t;
}

template <class K>
Mat<double> to_double_mat(const Mat<K>& A)
{
    Mat<double> B(A.rows(), A.cols());
    for (int i = 0; i < A.rows(); ++i)
        for (int j = 0; j < A.cols(); ++j)
            B(i, j) = field<K>::to_double(A(i, j));
    return B;
}

} // namespace revham
