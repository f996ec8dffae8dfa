#pragma once

#include <type_traits>
#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <ostream>
#include <utility>
#include <vector>

#include "scalar.hpp"

namespace semitoric {

using Vector = std::vector<Scalar>;
using QVector = std::vector<Rational>;
using IntVector = std::vector<Integer>;

/// Dense row-major matrix over an exact ring.
template <typename T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, T(0)) {}
    Matrix(std::initializer_list<std::initializer_list<T>> init)
    {
        rows_ = init.size();
        cols_ = rows_ == 0 ? 0 : init.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) {
                throw invalid_input("ragged matrix literal");
            }
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n)
    {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) {
            m(i, i) = T(1);
        }
        return m;
    }

    static Matrix from_rows(const std::vector<std::vector<T>>& rows, std::size_t cols_if_empty = 0)
    {
        std::size_t c = rows.empty() ? cols_if_empty : rows.front().size();
        Matrix m(rows.size(), c);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            if (rows[i].size() != c) {
                throw invalid_input("ragged matrix rows");
            }
            for (std::size_t j = 0; j < c; ++j) {
                m(i, j) = rows[i][j];
            }
        }
        return m;
    }

    static Matrix from_columns(const std::vector<std::vector<T>>& cols, std::size_t rows_if_empty = 0)
    {
        return from_rows(cols, rows_if_empty).transpose();
    }

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return cols_; }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    std::vector<T> row(std::size_t i) const
    {
        return std::vector<T>(data_.begin() + static_cast<std::ptrdiff_t>(i * cols_),
                              data_.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols_));
    }

    std::vector<T> col(std::size_t j) const
    {
        std::vector<T> c(rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            c[i] = (*this)(i, j);
        }
        return c;
    }

    std::vector<std::vector<T>> row_list() const
    {
        std::vector<std::vector<T>> out;
        for (std::size_t i = 0; i < rows_; ++i) {
            out.push_back(row(i));
        }
        return out;
    }

    Matrix transpose() const
    {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                t(j, i) = (*this)(i, j);
            }
        }
        return t;
    }

    bool is_zero() const
    {
        return std::all_of(data_.begin(), data_.end(), [](const T& x) { return x == T(0); });
    }

    bool is_square() const { return rows_ == cols_; }

    friend Matrix operator*(const Matrix& a, const Matrix& b)
    {
        if (a.cols_ != b.rows_) {
            throw invalid_input("matrix shape mismatch in product");
        }
        Matrix c(a.rows_, b.cols_);
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t k = 0; k < a.cols_; ++k) {
                const T& aik = a(i, k);
                if (aik == T(0)) {
                    continue;
                }
                for (std::size_t j = 0; j < b.cols_; ++j) {
                    c(i, j) += aik * b(k, j);
                }
            }
        }
        return c;
    }

    friend std::vector<T> operator*(const Matrix& a, const std::vector<T>& v)
    {
        if (a.cols_ != v.size()) {
            throw invalid_input("matrix/vector shape mismatch");
        }
        std::vector<T> out(a.rows_, T(0));
        for (std::size_t i = 0; i < a.rows_; ++i) {
            for (std::size_t j = 0; j < a.cols_; ++j) {
                out[i] += a(i, j) * v[j];
            }
        }
        return out;
    }

    friend Matrix operator+(Matrix a, const Matrix& b)
    {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.data_.size(); ++i) {
            a.data_[i] += b.data_[i];
        }
        return a;
    }

    friend Matrix operator-(Matrix a, const Matrix& b)
    {
        a.check_same_shape(b);
        for (std::size_t i = 0; i < a.data_.size(); ++i) {
            a.data_[i] -= b.data_[i];
        }
        return a;
    }

    friend Matrix operator*(const T& s, Matrix a)
    {
        for (auto& x : a.data_) {
            x *= s;
        }
        return a;
    }

    friend bool operator==(const Matrix& a, const Matrix& b)
    {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }
    friend bool operator!=(const Matrix& a, const Matrix& b) { return !(a == b); }

    friend std::ostream& operator<<(std::ostream& os, const Matrix& m)
    {
        os << '[';
        for (std::size_t i = 0; i < m.rows_; ++i) {
            os << (i ? ",[" : "[");
            for (std::size_t j = 0; j < m.cols_; ++j) {
                os << (j ? "," : "") << m(i, j);
            }
            os << ']';
        }
        return os << ']';
    }

    template <typename U>
    Matrix<U> cast() const
    {
        Matrix<U> out(rows_, cols_);
        for (std::size_t i = 0; i < rows_; ++i) {
            for (std::size_t j = 0; j < cols_; ++j) {
                out(i, j) = U((*this)(i, j));
            }
        }
        return out;
    }

private:
    void check_same_shape(const Matrix& b) const
    {
        if (rows_ != b.rows_ || cols_ != b.cols_) {
            throw invalid_input("matrix shape mismatch");
        }
    }

    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using IntMatrix = Matrix<Integer>;
using QMatrix = Matrix<Rational>;
using ScalarMatrix = Matrix<Scalar>;

inline QMatrix to_rational(const IntMatrix& m) { return m.cast<Rational>(); }

/// Integer matrix from a rational one; throws when an entry is not integral.
inline IntMatrix to_integer(const QMatrix& m)
{
    IntMatrix out(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (!is_integer(m(i, j))) {
                throw invalid_input("matrix entry is not integral");
            }
            out(i, j) = m(i, j).get_num();
        }
    }
    return out;
}

// ---------------------------------------------------------------------------
// Linear algebra over a field (Rational or Scalar).

/// Reduced row echelon form in place; returns pivot columns.
template <typename T>
std::vector<std::size_t> rref_in_place(Matrix<T>& m)
{
    std::vector<std::size_t> pivots;
    std::size_t r = 0;
    for (std::size_t c = 0; c < m.cols() && r < m.rows(); ++c) {
        std::size_t p = r;
        while (p < m.rows() && m(p, c) == T(0)) {
            ++p;
        }
        if (p == m.rows()) {
            continue;
        }
        if (p != r) {
            for (std::size_t j = 0; j < m.cols(); ++j) {
                std::swap(m(p, j), m(r, j));
            }
        }
        T inv = T(1) / m(r, c);
        for (std::size_t j = c; j < m.cols(); ++j) {
            m(r, j) *= inv;
        }
        for (std::size_t i = 0; i < m.rows(); ++i) {
            if (i == r || m(i, c) == T(0)) {
                continue;
            }
            T f = m(i, c);
            for (std::size_t j = c; j < m.cols(); ++j) {
                m(i, j) -= f * m(r, j);
            }
        }
        pivots.push_back(c);
        ++r;
    }
    return pivots;
}

template <typename T>
Matrix<T> rref(Matrix<T> m)
{
    rref_in_place(m);
    return m;
}

template <typename T>
std::size_t rank(Matrix<T> m)
{
    return rref_in_place(m).size();
}

/// Rank of a family of vectors of common length n.
template <typename T>
std::size_t rank_of(const std::vector<std::vector<T>>& vs, std::size_t n)
{
    if (vs.empty()) {
        return 0;
    }
    return rank(Matrix<T>::from_rows(vs, n));
}

/// Basis of {x : m x = 0}.
template <typename T>
std::vector<std::vector<T>> nullspace(Matrix<T> m)
{
    auto pivots = rref_in_place(m);
    std::vector<bool> is_pivot(m.cols(), false);
    for (auto p : pivots) {
        is_pivot[p] = true;
    }
    std::vector<std::vector<T>> basis;
    for (std::size_t free = 0; free < m.cols(); ++free) {
        if (is_pivot[free]) {
            continue;
        }
        std::vector<T> v(m.cols(), T(0));
        v[free] = T(1);
        for (std::size_t i = 0; i < pivots.size(); ++i) {
            v[pivots[i]] = -m(i, free);
        }
        basis.push_back(std::move(v));
    }
    return basis;
}

/// Basis of the orthogonal complement of span(vs) inside T^n.
template <typename T>
std::vector<std::vector<T>> orthogonal_complement(const std::vector<std::vector<T>>& vs, std::size_t n)
{
    if (vs.empty()) {
        std::vector<std::vector<T>> basis;
        for (std::size_t i = 0; i < n; ++i) {
            std::vector<T> e(n, T(0));
            e[i] = T(1);
            basis.push_back(std::move(e));
        }
        return basis;
    }
    return nullspace(Matrix<T>::from_rows(vs, n));
}

/// Basis (rows of the RREF) of span(vs).
template <typename T>
std::vector<std::vector<T>> span_basis(const std::vector<std::vector<T>>& vs, std::size_t n)
{
    if (vs.empty()) {
        return {};
    }
    Matrix<T> m = Matrix<T>::from_rows(vs, n);
    auto pivots = rref_in_place(m);
    std::vector<std::vector<T>> out;
    for (std::size_t i = 0; i < pivots.size(); ++i) {
        out.push_back(m.row(i));
    }
    return out;
}

/// Column space basis (independent columns of m).
template <typename T>
std::vector<std::vector<T>> column_space(const Matrix<T>& m)
{
    Matrix<T> r = m;
    auto pivots = rref_in_place(r);
    std::vector<std::vector<T>> out;
    for (auto p : pivots) {
        out.push_back(m.col(p));
    }
    return out;
}

/// Basis of span(a) ∩ span(b) in T^n.
template <typename T>
std::vector<std::vector<T>> intersect_spans(const std::vector<std::vector<T>>& a,
                                            const std::vector<std::vector<T>>& b, std::size_t n)
{
    if (a.empty() || b.empty()) {
        return {};
    }
    // x = A s = B t  <=>  [A | -B] (s,t) = 0
    Matrix<T> m(n, a.size() + b.size());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < a.size(); ++j) {
            m(i, j) = a[j][i];
        }
        for (std::size_t j = 0; j < b.size(); ++j) {
            m(i, a.size() + j) = -b[j][i];
        }
    }
    std::vector<std::vector<T>> vecs;
    for (const auto& st : nullspace(m)) {
        std::vector<T> x(n, T(0));
        for (std::size_t j = 0; j < a.size(); ++j) {
            for (std::size_t i = 0; i < n; ++i) {
                x[i] += st[j] * a[j][i];
            }
        }
        vecs.push_back(std::move(x));
    }
    return span_basis(vecs, n);
}

template <typename T>
bool in_span(const std::vector<std::vector<T>>& basis, const std::vector<T>& v, std::size_t n)
{
    auto ext = basis;
    ext.push_back(v);
    return rank_of(ext, n) == rank_of(basis, n);
}

template <typename T>
T determinant(Matrix<T> m)
{
    if (!m.is_square()) {
        throw invalid_input("determinant of non-square matrix");
    }
    std::size_t n = m.rows();
    T det(1);
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && m(p, c) == T(0)) {
            ++p;
        }
        if (p == n) {
            return T(0);
        }
        if (p != c) {
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(p, j), m(c, j));
            }
            det = -det;
        }
        det *= m(c, c);
        T inv = T(1) / m(c, c);
        for (std::size_t i = c + 1; i < n; ++i) {
            if (m(i, c) == T(0)) {
                continue;
            }
            T f = m(i, c) * inv;
            for (std::size_t j = c; j < n; ++j) {
                m(i, j) -= f * m(c, j);
            }
        }
    }
    return det;
}

/// Fraction-free (Bareiss) determinant of an integer matrix.
inline Integer determinant(IntMatrix m)
{
    if (!m.is_square()) {
        throw invalid_input("determinant of non-square matrix");
    }
    std::size_t n = m.rows();
    if (n == 0) {
        return 1;
    }
    Integer prev = 1;
    int s = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m(k, k) == 0) {
            std::size_t p = k + 1;
            while (p < n && m(p, k) == 0) {
                ++p;
            }
            if (p == n) {
                return 0;
            }
            for (std::size_t j = 0; j < n; ++j) {
                std::swap(m(p, j), m(k, j));
            }
            s = -s;
        }
        for (std::size_t i = k + 1; i < n; ++i) {
            for (std::size_t j = k + 1; j < n; ++j) {
                m(i, j) = (m(i, j) * m(k, k) - m(i, k) * m(k, j)) / prev;
            }
        }
        prev = m(k, k);
    }
    return s * m(n - 1, n - 1);
}

template <typename T>
Matrix<T> inverse(const Matrix<T>& m)
{
    if (!m.is_square()) {
        throw invalid_input("inverse of non-square matrix");
    }
    std::size_t n = m.rows();
    Matrix<T> aug(n, 2 * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            aug(i, j) = m(i, j);
        }
        aug(i, n + i) = T(1);
    }
    auto pivots = rref_in_place(aug);
    if (pivots.size() < n || pivots[n - 1] != n - 1) {
        throw invalid_input("matrix is singular");
    }
    Matrix<T> inv(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            inv(i, j) = aug(i, n + j);
        }
    }
    return inv;
}

/// Inverse of a unimodular integer matrix.
inline IntMatrix unimodular_inverse(const IntMatrix& m)
{
    Integer d = determinant(m);
    if (d != 1 && d != -1) {
        throw invalid_input("matrix is not unimodular (det = " + d.get_str() + ")");
    }
    return to_integer(inverse(to_rational(m)));
}

template <typename T>
Matrix<T> power(const Matrix<T>& m, long k)
{
    if (k < 0) {
        if constexpr (std::is_same_v<T, Integer>) {
            return power(unimodular_inverse(m), -k);
        } else {
            return power(inverse(m), -k);
        }
    }
    Matrix<T> r = Matrix<T>::identity(m.rows());
    Matrix<T> b = m;
    while (k > 0) {
        if (k & 1) {
            r = r * b;
        }
        b = b * b;
        k >>= 1;
    }
    return r;
}

template <typename T>
T dot(const std::vector<T>& a, const std::vector<T>& b)
{
    T s(0);
    for (std::size_t i = 0; i < a.size(); ++i) {
        s += a[i] * b[i];
    }
    return s;
}

// ---------------------------------------------------------------------------
// Integer normal forms.

struct HermiteResult {
    IntMatrix H; // row-style Hermite normal form
    IntMatrix U; // unimodular, H = U * M
};

/// Row-style Hermite normal form: pivots positive, entries above each pivot
/// reduced into [0, pivot), zero rows at the bottom.
inline HermiteResult hermite_normal_form(const IntMatrix& m)
{
    if (m.rows() == 0 || m.cols() == 0 || m.is_zero()) {
        throw invalid_input("degenerate input: zero matrix");
    }
    IntMatrix h = m;
    IntMatrix u = IntMatrix::identity(m.rows());
    const std::size_t rows = h.rows();
    const std::size_t cols = h.cols();

    auto row_combine = [&](std::size_t i, std::size_t j, const Integer& a, const Integer& b, const Integer& c,
                           const Integer& d) {
        // (row_i, row_j) <- (a row_i + b row_j, c row_i + d row_j)
        for (IntMatrix* x : {&h, &u}) {
            for (std::size_t k = 0; k < x->cols(); ++k) {
                Integer ri = (*x)(i, k);
                Integer rj = (*x)(j, k);
                (*x)(i, k) = a * ri + b * rj;
                (*x)(j, k) = c * ri + d * rj;
            }
        }
    };

    std::size_t r = 0;
    for (std::size_t c = 0; c < cols && r < rows; ++c) {
        for (std::size_t i = r + 1; i < rows; ++i) {
            if (h(i, c) == 0) {
                continue;
            }
            Integer g, s, t;
            mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), h(r, c).get_mpz_t(), h(i, c).get_mpz_t());
            Integer a = h(r, c) / g;
            Integer b = h(i, c) / g;
            // [s t; -b a] has determinant s a + t b = 1
            row_combine(r, i, s, t, Integer(-b), a);
        }
        if (h(r, c) == 0) {
            continue;
        }
        if (h(r, c) < 0) {
            row_combine(r, r, Integer(-1), Integer(0), Integer(-1), Integer(0));
        }
        for (std::size_t i = 0; i < r; ++i) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), h(i, c).get_mpz_t(), h(r, c).get_mpz_t());
            if (q != 0) {
                for (IntMatrix* x : {&h, &u}) {
                    for (std::size_t k = 0; k < x->cols(); ++k) {
                        (*x)(i, k) -= q * (*x)(r, k);
                    }
                }
            }
        }
        ++r;
    }
    return {std::move(h), std::move(u)};
}

/// Nonzero rows of the Hermite form: a canonical basis of the row lattice.
inline IntMatrix lattice_basis(const IntMatrix& generators)
{
    if (generators.is_zero()) {
        return IntMatrix(0, generators.cols());
    }
    auto h = hermite_normal_form(generators).H;
    std::size_t nz = 0;
    while (nz < h.rows()) {
        bool zero = true;
        for (std::size_t j = 0; j < h.cols(); ++j) {
            if (h(nz, j) != 0) {
                zero = false;
                break;
            }
        }
        if (zero) {
            break;
        }
        ++nz;
    }
    IntMatrix out(nz, h.cols());
    for (std::size_t i = 0; i < nz; ++i) {
        for (std::size_t j = 0; j < h.cols(); ++j) {
            out(i, j) = h(i, j);
        }
    }
    return out;
}

/// Basis (rows) of the integer kernel {x in Z^n : m x = 0}; saturated.
inline std::vector<IntVector> integer_kernel(const IntMatrix& m)
{
    const std::size_t n = m.cols();
    if (m.rows() == 0 || m.is_zero()) {
        return IntMatrix::identity(n).row_list();
    }
    auto hr = hermite_normal_form(m.transpose());
    std::vector<IntVector> out;
    for (std::size_t i = 0; i < hr.H.rows(); ++i) {
        bool zero = true;
        for (std::size_t j = 0; j < hr.H.cols(); ++j) {
            if (hr.H(i, j) != 0) {
                zero = false;
                break;
            }
        }
        if (zero) {
            out.push_back(hr.U.row(i));
        }
    }
    return out;
}

/// Diagonal of the Smith normal form (elementary divisors, nonzero ones only).
inline std::vector<Integer> elementary_divisors(IntMatrix m)
{
    std::vector<Integer> out;
    const std::size_t rows = m.rows();
    const std::size_t cols = m.cols();
    std::size_t t = 0;
    while (t < rows && t < cols) {
        // Find a nonzero entry of minimal absolute value in the remaining block.
        std::size_t pi = rows, pj = cols;
        for (std::size_t i = t; i < rows; ++i) {
            for (std::size_t j = t; j < cols; ++j) {
                if (m(i, j) != 0 && (pi == rows || abs(m(i, j)) < abs(m(pi, pj)))) {
                    pi = i;
                    pj = j;
                }
            }
        }
        if (pi == rows) {
            break;
        }
        for (std::size_t j = 0; j < cols; ++j) {
            std::swap(m(t, j), m(pi, j));
        }
        for (std::size_t i = 0; i < rows; ++i) {
            std::swap(m(i, t), m(i, pj));
        }
        bool clean = true;
        for (std::size_t i = t + 1; i < rows; ++i) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), m(i, t).get_mpz_t(), m(t, t).get_mpz_t());
            for (std::size_t j = t; j < cols; ++j) {
                m(i, j) -= q * m(t, j);
            }
            if (m(i, t) != 0) {
                clean = false;
            }
        }
        for (std::size_t j = t + 1; j < cols; ++j) {
            Integer q;
            mpz_fdiv_q(q.get_mpz_t(), m(t, j).get_mpz_t(), m(t, t).get_mpz_t());
            for (std::size_t i = t; i < rows; ++i) {
                m(i, j) -= q * m(i, t);
            }
            if (m(t, j) != 0) {
                clean = false;
            }
        }
        if (!clean) {
            continue;
        }
        // Enforce divisibility of the remaining block by the pivot.
        bool divides = true;
        for (std::size_t i = t + 1; i < rows && divides; ++i) {
            for (std::size_t j = t + 1; j < cols; ++j) {
                if (m(i, j) % m(t, t) != 0) {
                    for (std::size_t k = t; k < cols; ++k) {
                        m(t, k) += m(i, k);
                    }
                    divides = false;
                    break;
                }
            }
        }
        if (!divides) {
            continue;
        }
        out.push_back(abs(m(t, t)));
        ++t;
    }
    return out;
}

} // namespace semitoric
