#pragma once

#include "polynomial.hpp"

#include <cassert>
#include <vector>

namespace sob {

template <class T>
class MatrixT {
public:
    MatrixT() = default;
    MatrixT(int rows, int cols, const T& fill = T(0)) : r_(rows), c_(cols), d_(std::size_t(rows) * cols, fill) {}

    static MatrixT identity(int n) {
        MatrixT m(n, n);
        for (int i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }
    static MatrixT diag(const std::vector<T>& v) {
        MatrixT m(static_cast<int>(v.size()), static_cast<int>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) m(i, i) = v[i];
        return m;
    }
    static MatrixT row(const std::vector<T>& v) {
        MatrixT m(1, static_cast<int>(v.size()));
        for (std::size_t i = 0; i < v.size(); ++i) m(0, i) = v[i];
        return m;
    }
    static MatrixT col(const std::vector<T>& v) {
        MatrixT m(static_cast<int>(v.size()), 1);
        for (std::size_t i = 0; i < v.size(); ++i) m(i, 0) = v[i];
        return m;
    }

    int rows() const { return r_; }
    int cols() const { return c_; }
    T& operator()(int i, int j) { return d_[std::size_t(i) * c_ + j]; }
    const T& operator()(int i, int j) const { return d_[std::size_t(i) * c_ + j]; }

    MatrixT block(int r0, int c0, int nr, int nc) const {
        MatrixT m(nr, nc);
        for (int i = 0; i < nr; ++i)
            for (int j = 0; j < nc; ++j) m(i, j) = (*this)(r0 + i, c0 + j);
        return m;
    }
    MatrixT lead(int k) const { return block(0, 0, k, k); }
    void set_block(int r0, int c0, const MatrixT& b) {
        for (int i = 0; i < b.rows(); ++i)
            for (int j = 0; j < b.cols(); ++j) (*this)(r0 + i, c0 + j) = b(i, j);
    }
    std::vector<T> row_vec(int i) const { return {d_.begin() + std::size_t(i) * c_, d_.begin() + std::size_t(i + 1) * c_}; }
    std::vector<T> col_vec(int j) const {
        std::vector<T> v(r_);
        for (int i = 0; i < r_; ++i) v[i] = (*this)(i, j);
        return v;
    }

    MatrixT transpose() const {
        MatrixT m(c_, r_);
        for (int i = 0; i < r_; ++i)
            for (int j = 0; j < c_; ++j) m(j, i) = (*this)(i, j);
        return m;
    }

    MatrixT& operator+=(const MatrixT& o) {
        assert(r_ == o.r_ && c_ == o.c_);
        for (std::size_t i = 0; i < d_.size(); ++i) d_[i] += o.d_[i];
        return *this;
    }
    MatrixT& operator-=(const MatrixT& o) {
        assert(r_ == o.r_ && c_ == o.c_);
        for (std::size_t i = 0; i < d_.size(); ++i) d_[i] -= o.d_[i];
        return *this;
    }
    friend MatrixT operator+(MatrixT a, const MatrixT& b) { return a += b; }
    friend MatrixT operator-(MatrixT a, const MatrixT& b) { return a -= b; }
    friend MatrixT operator*(const MatrixT& a, const MatrixT& b) {
        assert(a.c_ == b.r_);
        MatrixT m(a.r_, b.c_);
        for (int i = 0; i < a.r_; ++i)
            for (int k = 0; k < a.c_; ++k) {
                const T& aik = a(i, k);
                if (aik == T(0)) continue;
                for (int j = 0; j < b.c_; ++j) m(i, j) += aik * b(k, j);
            }
        return m;
    }
    friend MatrixT operator*(MatrixT a, const Real& s) {
        for (auto& v : a.d_) v = v * s;
        return a;
    }
    friend MatrixT operator*(const Real& s, MatrixT a) { return a * s; }

    friend bool operator==(const MatrixT& a, const MatrixT& b) { return a.r_ == b.r_ && a.c_ == b.c_ && a.d_ == b.d_; }

private:
    int r_ = 0, c_ = 0;
    std::vector<T> d_;
};

using Matrix = MatrixT<Real>;
using PolyMatrix = MatrixT<Polynomial>;
using Vector = std::vector<Real>;

inline Real max_abs(const Matrix& m) {
    Real s = 0;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) s = std::max(s, abs(m(i, j)));
    return s;
}

// max |a-b| / max(|a|,|b|,floor)
inline Real rel_diff(const Matrix& a, const Matrix& b, const Real& floor = Real(0)) {
    Real s = std::max(std::max(max_abs(a), max_abs(b)), floor);
    if (s == 0) return 0;
    return max_abs(a - b) / s;
}

// ---- structural operators ----

// Λ: ones on the first superdiagonal
inline Matrix shift_matrix(int k) {
    Matrix m(k, k);
    for (int i = 0; i + 1 < k; ++i) m(i, i + 1) = 1;
    return m;
}

// D^n: entry (i, i-n) = i(i-1)...(i-n+1)
inline Matrix derivation_matrix(int k, int n = 1) {
    Matrix m(k, k);
    for (int i = n; i < k; ++i) {
        Real f = 1;
        for (int j = 0; j < n; ++j) f *= (i - j);
        m(i, i - n) = f;
    }
    return m;
}

inline Real binomial(int n, int k) {
    if (k < 0 || k > n) return 0;
    Real r = 1;
    for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
    return r;
}

inline Real factorial(int n) {
    Real r = 1;
    for (int i = 2; i <= n; ++i) r *= i;
    return r;
}

// P(𝒳) on the derivative stack: entry (a, a+i) = C(a+i, i) P^{(i)}
inline PolyMatrix x_operator(int k, const Polynomial& p) {
    PolyMatrix m(k, k, Polynomial());
    for (int a = 0; a < k; ++a)
        for (int i = 0; a + i < k; ++i) {
            Polynomial d = p.derivative(i);
            if (d.is_zero()) break;
            m(a, a + i) = d * binomial(a + i, i);
        }
    return m;
}

// numeric evaluation of a polynomial matrix
inline Matrix evaluate(const PolyMatrix& m, const Real& x) {
    Matrix r(m.rows(), m.cols());
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j) r(i, j) = m(i, j)(x);
    return r;
}

// p(A) for square A
inline Matrix poly_of(const Polynomial& p, const Matrix& a) {
    Matrix r(a.rows(), a.cols());
    for (int k = p.degree(); k >= 0; --k) r = r * a + Matrix::identity(a.rows()) * p[k];
    return r;
}

// ---- dense solvers ----

namespace detail {
// In-place LU with partial pivoting; returns permutation. Throws SingularBlock on tiny pivots.
inline std::vector<int> lu_pivot(Matrix& a, const Real& rel) {
    int n = a.rows();
    std::vector<int> perm(n);
    for (int i = 0; i < n; ++i) perm[i] = i;
    Real scale = max_abs(a);
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (abs(a(i, k)) > abs(a(p, k))) p = i;
        if (abs(a(p, k)) <= rel * scale || a(p, k) == 0)
            throw SingularBlock("pivot " + std::to_string(k) + " underflows tolerance");
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            std::swap(perm[k], perm[p]);
        }
        for (int i = k + 1; i < n; ++i) {
            a(i, k) /= a(k, k);
            const Real& f = a(i, k);
            if (f == 0) continue;
            for (int j = k + 1; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return perm;
}
}  // namespace detail

// Solve A X = B
inline Matrix solve(Matrix a, const Matrix& b, const Real& rel = tol()) {
    int n = a.rows();
    if (n == 0) return Matrix(0, b.cols());
    auto perm = detail::lu_pivot(a, rel);
    Matrix x(n, b.cols());
    for (int c = 0; c < b.cols(); ++c) {
        std::vector<Real> y(n);
        for (int i = 0; i < n; ++i) {
            Real s = b(perm[i], c);
            for (int j = 0; j < i; ++j) s -= a(i, j) * y[j];
            y[i] = s;
        }
        for (int i = n - 1; i >= 0; --i) {
            Real s = y[i];
            for (int j = i + 1; j < n; ++j) s -= a(i, j) * x(j, c);
            x(i, c) = s / a(i, i);
        }
    }
    return x;
}

// Solve X A = B (B has A.rows() columns)
inline Matrix solve_right(const Matrix& a, const Matrix& b, const Real& rel = tol()) {
    return solve(a.transpose(), b.transpose(), rel).transpose();
}

inline Matrix inverse(const Matrix& a, const Real& rel = tol()) { return solve(a, Matrix::identity(a.rows()), rel); }

inline Real det(Matrix a) {
    int n = a.rows();
    Real d = 1;
    for (int k = 0; k < n; ++k) {
        int p = k;
        for (int i = k + 1; i < n; ++i)
            if (abs(a(i, k)) > abs(a(p, k))) p = i;
        if (a(p, k) == 0) return 0;
        if (p != k) {
            for (int j = 0; j < n; ++j) std::swap(a(k, j), a(p, j));
            d = -d;
        }
        d *= a(k, k);
        for (int i = k + 1; i < n; ++i) {
            Real f = a(i, k) / a(k, k);
            for (int j = k; j < n; ++j) a(i, j) -= f * a(k, j);
        }
    }
    return d;
}

// Θ*: D - C A^{-1} B with M split at n
inline Matrix schur_complement(const Matrix& m, int n, const Real& rel = tol()) {
    int r = m.rows() - n, c = m.cols() - n;
    Matrix a = m.block(0, 0, n, n), b = m.block(0, n, n, c), cc = m.block(n, 0, r, n), d = m.block(n, n, r, c);
    if (n == 0) return d;
    return d - cc * solve(a, b, rel);
}

// scalar Θ* of [[A, b], [c, d]] with A n×n, b a column, c a row
inline Real theta_star(const Matrix& a, const Vector& b, const Vector& c, const Real& d, const Real& rel = tol()) {
    int n = a.rows();
    if (n == 0) return d;
    Matrix x = solve(a, Matrix::col(b), rel);
    Real s = d;
    for (int i = 0; i < n; ++i) s -= c[i] * x(i, 0);
    return s;
}

// Polynomial-valued Θ*: d - c A^{-1} b where b, d are polynomials
inline Polynomial theta_star(const Matrix& a, const std::vector<Polynomial>& b, const Vector& c, const Polynomial& d,
                             const Real& rel = tol()) {
    int n = a.rows();
    if (n == 0) return d;
    Matrix w = solve_right(a, Matrix::row(c), rel);  // c A^{-1}
    Polynomial s = d;
    for (int i = 0; i < n; ++i) s -= b[i] * w(0, i);
    return s;
}

// ---- band structure ----

struct BandProfile {
    int lower = 0;
    int upper = 0;
};

// true iff every entry outside the band is below tol relative to the max entry
inline bool satisfies(const Matrix& m, BandProfile p, const Real& rel = tol()) {
    Real s = max_abs(m);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if ((i - j > p.lower || j - i > p.upper) && abs(m(i, j)) > rel * s) return false;
    return true;
}

inline BandProfile band_of(const Matrix& m, const Real& rel = tol()) {
    BandProfile p;
    Real s = max_abs(m);
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < m.cols(); ++j)
            if (abs(m(i, j)) > rel * s) {
                p.lower = std::max(p.lower, i - j);
                p.upper = std::max(p.upper, j - i);
            }
    return p;
}

}  // namespace sob
