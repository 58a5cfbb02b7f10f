#pragma once

#include "measures.hpp"

namespace sob {

// (N+1)×(N+1) grid of measures; entry (n, r) pairs f^{(n)} with h^{(r)}.
class MeasureMatrix {
public:
    MeasureMatrix() : MeasureMatrix(0) {}
    explicit MeasureMatrix(int order) : n_(order), e_(std::size_t(order + 1) * (order + 1)) {
        if (order < 0) throw ParameterOutOfRange("order must be >= 0");
    }
    static MeasureMatrix scalar(const Measure& m) {
        MeasureMatrix w(0);
        w(0, 0) = m;
        return w;
    }
    static MeasureMatrix diagonal(const std::vector<Measure>& d) {
        MeasureMatrix w(static_cast<int>(d.size()) - 1);
        for (std::size_t i = 0; i < d.size(); ++i) w(i, i) = d[i];
        return w;
    }

    int order() const { return n_; }
    int dim() const { return n_ + 1; }
    Measure& operator()(int i, int j) { return e_[std::size_t(i) * dim() + j]; }
    const Measure& operator()(int i, int j) const { return e_[std::size_t(i) * dim() + j]; }

    MeasureMatrix transpose() const {
        MeasureMatrix t(n_);
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    // grow to a larger order (new entries zero)
    MeasureMatrix padded(int order) const {
        MeasureMatrix t(std::max(order, n_));
        for (int i = 0; i < dim(); ++i)
            for (int j = 0; j < dim(); ++j) t(i, j) = (*this)(i, j);
        return t;
    }

    friend MeasureMatrix operator+(const MeasureMatrix& a, const MeasureMatrix& b) {
        MeasureMatrix s = a.padded(b.order());
        for (int i = 0; i < b.dim(); ++i)
            for (int j = 0; j < b.dim(); ++j) s(i, j) += b(i, j);
        return s;
    }

    // drop trailing all-zero rows/columns
    MeasureMatrix trimmed() const {
        int k = n_;
        auto empty = [&](int r) {
            for (int j = 0; j <= n_; ++j)
                if (!(*this)(r, j).is_zero() || !(*this)(j, r).is_zero()) return false;
            return true;
        };
        while (k > 0 && empty(k)) --k;
        MeasureMatrix t(k);
        for (int i = 0; i <= k; ++i)
            for (int j = 0; j <= k; ++j) t(i, j) = (*this)(i, j);
        return t;
    }

    std::pair<Real, Real> hull() const {
        Real inf = std::numeric_limits<double>::infinity();
        Real lo = inf, hi = -inf;
        for (auto& m : e_) {
            if (m.is_zero()) continue;
            auto [l, h] = m.hull();
            lo = std::min(lo, l);
            hi = std::max(hi, h);
        }
        return {lo, hi};
    }
    // sup |x| over the support hull
    Real radius() const {
        auto [lo, hi] = hull();
        if (lo > hi) return 0;
        return std::max(abs(lo), abs(hi));
    }

private:
    int n_;
    std::vector<Measure> e_;
};

// M-weighted polynomial matrix product: P(𝒳)-type measure-side deformations.
// Computes L W R^T where L, R are polynomial matrices acting on derivative stacks.
inline MeasureMatrix sandwich(const PolyMatrix& l, const MeasureMatrix& w, const PolyMatrix& r) {
    int n = std::min({l.rows(), r.rows()});
    MeasureMatrix out(n - 1);
    for (int a = 0; a < n; ++a)
        for (int b = 0; b < n; ++b) {
            Measure s;
            for (int c = 0; c < std::min(l.cols(), w.dim()); ++c)
                for (int d = 0; d < std::min(r.cols(), w.dim()); ++d) {
                    if (w(c, d).is_zero()) continue;
                    Polynomial coef = l(a, c) * r(b, d);
                    if (coef.is_zero()) continue;
                    s += coef * w(c, d);
                }
            out(a, b) = s;
        }
    return out.trimmed();
}

// Σ_{n,r} ∫ f^{(n)} h^{(r)} dμ_{n,r}
inline Real bilinear(const Polynomial& f, const Polynomial& h, const MeasureMatrix& w) {
    Real s = 0;
    for (int n = 0; n < w.dim(); ++n) {
        Polynomial fn = f.derivative(n);
        if (fn.is_zero()) continue;
        for (int r = 0; r < w.dim(); ++r) {
            const Measure& m = w(n, r);
            if (m.is_zero()) continue;
            Polynomial p = fn * h.derivative(r);
            if (p.is_zero()) continue;
            auto mu = raw_moments(m, p.degree() + 1);
            for (int i = 0; i <= p.degree(); ++i) s += p[i] * mu[i];
        }
    }
    return s;
}

// Moment tables μ^{(n,r)}_j for all entries, j < count.
struct MomentTable {
    int dim = 0;
    std::vector<std::vector<Real>> mu;  // row-major over (n, r)

    MomentTable(const MeasureMatrix& w, int count) : dim(w.dim()), mu(std::size_t(dim) * dim) {
        for (int n = 0; n < dim; ++n)
            for (int r = 0; r < dim; ++r)
                if (!w(n, r).is_zero()) mu[std::size_t(n) * dim + r] = raw_moments(w(n, r), count);
    }

    // (x^i, x^j; W) = Σ_{l≤i, r≤j} (i)_l (j)_r μ^{(l,r)}_{i-l+j-r}
    Real entry(int i, int j) const {
        Real s = 0;
        Real fi = 1;
        for (int l = 0; l < dim && l <= i; ++l) {
            if (l > 0) fi *= (i - l + 1);
            Real fj = 1;
            for (int r = 0; r < dim && r <= j; ++r) {
                if (r > 0) fj *= (j - r + 1);
                const auto& m = mu[std::size_t(l) * dim + r];
                if (m.empty()) continue;
                s += fi * fj * m[i - l + j - r];
            }
        }
        return s;
    }
};

// G^{[k]} = Σ D^l g_{l,r} (D^r)^T, truncated
inline Matrix assemble_moment_matrix(const MeasureMatrix& w, int k) {
    if (k < 1) throw ParameterOutOfRange("size must be >= 1");
    MomentTable t(w, 2 * k);
    Matrix g(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) g(i, j) = t.entry(i, j);
    return g;
}

// rectangular block of the semi-infinite moment matrix
inline Matrix moment_block(const MeasureMatrix& w, int rows, int cols) {
    MomentTable t(w, rows + cols);
    Matrix g(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) g(i, j) = t.entry(i, j);
    return g;
}

inline Matrix unit_lower_inverse(const Matrix& l) {
    int n = l.rows();
    Matrix x = Matrix::identity(n);
    for (int j = 0; j < n; ++j)
        for (int i = j + 1; i < n; ++i) {
            Real s = 0;
            for (int m = j; m < i; ++m) s += l(i, m) * x(m, j);
            x(i, j) = -s;
        }
    return x;
}

// G = S1^{-1} H S2^{-T}
struct Factorization {
    Matrix S1, S2;
    Vector h;
    int size() const { return S1.rows(); }
    Matrix H() const { return Matrix::diag(h); }
    Matrix reconstruct() const {
        return unit_lower_inverse(S1) * H() * unit_lower_inverse(S2).transpose();
    }
};

// Unpivoted Doolittle elimination.
inline Factorization factorize(const Matrix& g) {
    int k = g.rows();
    Matrix l = Matrix::identity(k), u(k, k);
    Real scale = 0;
    for (int s = 0; s < k; ++s) {
        for (int i = 0; i <= s; ++i) scale = std::max({scale, abs(g(s, i)), abs(g(i, s))});
        for (int j = s; j < k; ++j) {
            Real v = g(s, j);
            for (int m = 0; m < s; ++m) v -= l(s, m) * u(m, j);
            u(s, j) = v;
        }
        if (abs(u(s, s)) <= tol() * scale) throw NotFactorizable(s + 1);
        for (int i = s + 1; i < k; ++i) {
            Real v = g(i, s);
            for (int m = 0; m < s; ++m) v -= l(i, m) * u(m, s);
            l(i, s) = v / u(s, s);
        }
    }
    Factorization f;
    f.h.resize(k);
    Matrix v(k, k);  // (H^{-1} U)^T, unit lower
    for (int i = 0; i < k; ++i) {
        f.h[i] = u(i, i);
        for (int j = i; j < k; ++j) v(j, i) = u(i, j) / u(i, i);
    }
    f.S1 = unit_lower_inverse(l);
    f.S2 = unit_lower_inverse(v);
    return f;
}

inline std::vector<Polynomial> rows_as_polynomials(const Matrix& s) {
    std::vector<Polynomial> p;
    for (int i = 0; i < s.rows(); ++i) {
        std::vector<Real> c(i + 1);
        for (int j = 0; j <= i; ++j) c[j] = s(i, j);
        p.emplace_back(std::move(c));
    }
    return p;
}

// P_k = x^k - G_{k,:k} (G^{[k]})^{-1} χ^{[k]}
inline Polynomial quasi_determinant_polynomial(const Matrix& g, int k) {
    std::vector<Real> c(k + 1, Real(0));
    c[k] = 1;
    if (k > 0) {
        Matrix w = solve_right(g.lead(k), g.block(k, 0, 1, k));
        for (int j = 0; j < k; ++j) c[j] = -w(0, j);
    }
    return Polynomial(std::move(c));
}

struct SBPS {
    std::vector<Polynomial> p1, p2;
    Vector h;
    Real crosscheck = 0;  // max relative distance between the elimination and Θ* paths
    int size() const { return static_cast<int>(h.size()); }
};

inline SBPS sbps_from(const Matrix& g, const Factorization& f) {
    SBPS s;
    s.p1 = rows_as_polynomials(f.S1);
    s.p2 = rows_as_polynomials(f.S2);
    s.h = f.h;
    Matrix gt = g.transpose();
    for (int k = 0; k < f.size(); ++k) {
        s.crosscheck = std::max(s.crosscheck, Polynomial::rel_distance(s.p1[k], quasi_determinant_polynomial(g, k)));
        s.crosscheck = std::max(s.crosscheck, Polynomial::rel_distance(s.p2[k], quasi_determinant_polynomial(gt, k)));
    }
    if (s.crosscheck > check_tol()) throw CheckFailed("elimination and quasi-determinant paths disagree");
    return s;
}

inline SBPS sbps(const Matrix& g) { return sbps_from(g, factorize(g)); }
inline SBPS sbps(const MeasureMatrix& w, int k) { return sbps(assemble_moment_matrix(w, k)); }

// max coefficient distance over both families plus relative norm distance
inline Real sbps_distance(const SBPS& a, const SBPS& b) {
    if (a.size() != b.size()) throw ParameterOutOfRange("sequence sizes differ");
    Real d = 0;
    for (int k = 0; k < a.size(); ++k) {
        d = std::max(d, Polynomial::rel_distance(a.p1[k], b.p1[k]));
        d = std::max(d, Polynomial::rel_distance(a.p2[k], b.p2[k]));
        d = std::max(d, abs(a.h[k] - b.h[k]) / std::max(abs(a.h[k]), abs(b.h[k])));
    }
    return d;
}

inline SBPS truncated(const SBPS& s, int k) {
    SBPS t;
    t.p1.assign(s.p1.begin(), s.p1.begin() + k);
    t.p2.assign(s.p2.begin(), s.p2.begin() + k);
    t.h.assign(s.h.begin(), s.h.begin() + k);
    t.crosscheck = s.crosscheck;
    return t;
}

// ---- second kind functions ----

struct SecondKindValue {
    Real c1, c2;
    Real tail;  // geometric bound on the truncated series remainder
};

// C_{1,l}(y) = (P_{1,l}, 1/(y-x); W), C_{2,l}(y) = (1/(y-x), P_{2,l}; W) by the χ* series.
inline SecondKindValue second_kind(const MeasureMatrix& w, const SBPS& s, int l, const Real& y) {
    Real rho = w.radius();
    if (!(abs(y) > rho)) throw DomainError("second-kind series needs |y| > sup|x| over the support");
    if (l >= s.size()) throw ParameterOutOfRange("index beyond factorization size");
    Real ratio = rho / abs(y);
    int m;
    if (ratio == 0) {
        m = l + w.dim() + 2;
    } else {
        double lr = -static_cast<double>(boost::multiprecision::log2(ratio));
        m = static_cast<int>(std::ceil((Precision::bits() + 30) / lr)) + 4 * w.dim() + l + 8;
        if (m > 6000) throw DomainError("second-kind series converges too slowly at this point");
    }
    MomentTable t(w, l + 1 + m);
    SecondKindValue v{0, 0, 0};
    Real yinv = 1 / y, pw = yinv;
    Real last = 0;
    for (int j = 0; j < m; ++j, pw *= yinv) {
        Real a1 = 0, a2 = 0;
        for (int i = 0; i <= l; ++i) {
            a1 += s.p1[l][i] * t.entry(i, j);
            a2 += t.entry(j, i) * s.p2[l][i];
        }
        v.c1 += a1 * pw;
        v.c2 += a2 * pw;
        last = std::max(abs(a1 * pw), abs(a2 * pw));
    }
    Real r = ratio * (1 + Real(w.dim()) / m);
    v.tail = r < 1 ? last * r / (1 - r) : Real(std::numeric_limits<double>::infinity());
    return v;
}

// Taylor coefficients at q (orders 0..n-1) of y -> (P, 1/(y-x); W) [slot 1] or (1/(y-x), P; W) [slot 2],
// evaluated by quadrature of the continuous parts and exactly on atoms; q must lie off the support.
inline std::vector<std::vector<Real>> second_kind_germs(const MeasureMatrix& w, const std::vector<Polynomial>& polys,
                                                        int slot, const Real& q, int n) {
    auto [lo, hi] = w.hull();
    if (q >= lo && q <= hi) throw DomainError("germ point lies inside the support hull");
    int np = static_cast<int>(polys.size());
    std::vector<std::vector<Real>> out(np, std::vector<Real>(n, Real(0)));
    int dim = w.dim();
    for (int a = 0; a < dim; ++a)
        for (int b = 0; b < dim; ++b) {
            const Measure& m = w(a, b);
            if (m.is_zero()) continue;
            int pd = slot == 1 ? a : b;  // derivative order on the polynomial
            int kd = slot == 1 ? b : a;  // derivative order on the kernel 1/(y-x)
            std::vector<Polynomial> dp(np);
            bool any = false;
            for (int i = 0; i < np; ++i) {
                dp[i] = polys[i].derivative(pd);
                any = any || !dp[i].is_zero();
            }
            if (!any) continue;
            // ∂_x^r (y-x)^{-1} = r!(y-x)^{-r-1}; its t-th Taylor coefficient in y at q is
            // r! (-1)^t C(r+t, t) (q-x)^{-r-1-t}
            std::vector<Real> coef(n);
            for (int t = 0; t < n; ++t) coef[t] = factorial(kd) * binomial(kd + t, t) * ((t % 2) ? -1 : 1);
            auto vals = integrate(m, np * n, [&](const Real& x, std::vector<Real>& o) {
                Real d = 1 / (q - x);
                Real base = pow(d, kd + 1);
                for (int i = 0; i < np; ++i) {
                    Real pv = dp[i](x), dd = base;
                    for (int t = 0; t < n; ++t, dd *= d) o[std::size_t(i) * n + t] = pv * coef[t] * dd;
                }
            });
            for (int i = 0; i < np; ++i)
                for (int t = 0; t < n; ++t) out[i][t] += vals[std::size_t(i) * n + t];
        }
    return out;
}

// ---- kernels ----

enum class KernelKind { CD, Cauchy, Mixed1, Mixed2 };

inline Real kernel(const MeasureMatrix& w, const SBPS& s, KernelKind kind, int l, const Real& x, const Real& y) {
    if (l > s.size()) throw ParameterOutOfRange("kernel size beyond factorization");
    Real sum = 0;
    for (int k = 0; k < l; ++k) {
        Real left, right;
        switch (kind) {
            case KernelKind::CD: left = s.p2[k](x); right = s.p1[k](y); break;
            case KernelKind::Cauchy: left = second_kind(w, s, k, x).c2; right = second_kind(w, s, k, y).c1; break;
            case KernelKind::Mixed1: left = second_kind(w, s, k, x).c2; right = s.p1[k](y); break;
            case KernelKind::Mixed2: left = s.p2[k](x); right = second_kind(w, s, k, y).c1; break;
        }
        sum += left * right / s.h[k];
    }
    return sum;
}

inline Real kernel_derivatives(const SBPS& s, int l, const Real& x, const Real& y, int t, int d) {
    Real sum = 0;
    for (int k = 0; k < l; ++k) sum += s.p2[k].derivative(t)(x) * s.p1[k].derivative(d)(y) / s.h[k];
    return sum;
}

// K^{[l]}(x, y) as a polynomial in x (fixed y) or in y (fixed x)
inline Polynomial kernel_in_x(const SBPS& s, int l, const Real& y) {
    Polynomial p;
    for (int k = 0; k < l; ++k) p += s.p2[k] * (s.p1[k](y) / s.h[k]);
    return p;
}
inline Polynomial kernel_in_y(const SBPS& s, int l, const Real& x) {
    Polynomial p;
    for (int k = 0; k < l; ++k) p += s.p1[k] * (s.p2[k](x) / s.h[k]);
    return p;
}

// best approximations Π_1[f](y) = Σ (f, P_{2,k}) h_k^{-1} P_{1,k}(y) and Π_2 analogously
inline Polynomial projection1(const MeasureMatrix& w, const SBPS& s, int l, const Polynomial& f) {
    Polynomial p;
    for (int k = 0; k < l; ++k) p += s.p1[k] * (bilinear(f, s.p2[k], w) / s.h[k]);
    return p;
}
inline Polynomial projection2(const MeasureMatrix& w, const SBPS& s, int l, const Polynomial& f) {
    Polynomial p;
    for (int k = 0; k < l; ++k) p += s.p2[k] * (bilinear(s.p1[k], f, w) / s.h[k]);
    return p;
}

}  // namespace sob
