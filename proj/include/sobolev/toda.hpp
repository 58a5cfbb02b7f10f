#pragma once

#include "sobolev.hpp"

#include <map>

namespace sob {

// t_a = {t_{a,j}}_{j>=1}; t_{a,0} is always 0
struct TimePoint {
    std::map<int, Real> t1, t2;

    void validate() const {
        for (auto* m : {&t1, &t2})
            for (auto& [j, v] : *m)
                if (j < 0 || (j == 0 && v != 0)) throw ParameterOutOfRange("flow indices start at 1 (t_{a,0} = 0)");
    }
    int max_flow() const {
        int j = 0;
        for (auto* m : {&t1, &t2})
            for (auto& [i, v] : *m)
                if (v != 0) j = std::max(j, i);
        return j;
    }
    TimePoint shifted(int a, int j, const Real& h) const {
        TimePoint t = *this;
        (a == 1 ? t.t1 : t.t2)[j] += h;
        return t;
    }
};

namespace detail {

inline Polynomial flow_polynomial(const std::map<int, Real>& t) {
    Polynomial s;
    for (auto& [j, v] : t) s += Polynomial::monomial(j, v);
    return s;
}

// coefficients of exp(sign * Σ t_j z^j), z^0..z^{n-1}
inline Vector exp_series(const std::map<int, Real>& t, int n, int sign = 1) {
    Vector c(n, Real(0));
    if (n == 0) return c;
    c[0] = 1;
    for (int m = 1; m < n; ++m) {
        Real s = 0;
        for (auto& [j, v] : t)
            if (j >= 1 && j <= m) s += j * v * c[m - j];
        c[m] = sign * s / m;
    }
    return c;
}

// Σ_{m,n<p} c_m d_n G_{i+m, j+n} for i < rows, j < cols
inline Matrix series_deform(const Matrix& g, const Vector& c, const Vector& d, int rows, int cols, int p) {
    Matrix t(rows, g.cols());
    for (int i = 0; i < rows; ++i)
        for (int q = 0; q < g.cols(); ++q) {
            Real s = 0;
            for (int m = 0; m < p && i + m < g.rows(); ++m)
                if (c[m] != 0) s += c[m] * g(i + m, q);
            t(i, q) = s;
        }
    Matrix out(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) {
            Real s = 0;
            for (int n = 0; n < p && j + n < g.cols(); ++n)
                if (d[n] != 0) s += t(i, j + n) * d[n];
            out(i, j) = s;
        }
    return out;
}

}  // namespace detail

// exp(s(𝒳)) on a derivative stack, without the scalar factor e^{s(x)}:
// entry (c, a) = C(a, c) φ_{a-c}, φ_0 = 1, φ_{m+1} = φ_m' + s' φ_m
inline PolyMatrix exp_x_operator(const Polynomial& s, int dim) {
    std::vector<Polynomial> phi(dim);
    if (dim > 0) phi[0] = Polynomial(1);
    for (int m = 1; m < dim; ++m) phi[m] = phi[m - 1].derivative() + s.derivative() * phi[m - 1];
    PolyMatrix e(dim, dim, Polynomial());
    for (int c = 0; c < dim; ++c)
        for (int a = c; a < dim; ++a) e(c, a) = phi[a - c] * binomial(a, c);
    return e;
}

// 𝒲(t) = exp(s1(𝒳)) 𝒲 exp(-s2(𝒳^T)), s_a = Σ_j t_{a,j} x^j
inline MeasureMatrix deformed_measure(const MeasureMatrix& w, const TimePoint& t) {
    t.validate();
    Polynomial s1 = detail::flow_polynomial(t.t1), s2 = detail::flow_polynomial(t.t2);
    MeasureMatrix m = sandwich(exp_x_operator(s1, w.dim()), w, exp_x_operator(-s2, w.dim()));
    Polynomial tilt = s1 - s2;
    if (tilt.is_zero()) return m;
    for (int i = 0; i < m.dim(); ++i)
        for (int j = 0; j < m.dim(); ++j) m(i, j) = m(i, j).tilted(tilt);
    return m;
}

struct DeformedMoments {
    Matrix moment_side;   // W10 G W20^{-1}, padded then cropped
    Matrix measure_side;  // G of 𝒲(t)
    Real agreement = 0;
    int padding = 0;
};

// W_{1,0}(t_1) G W_{2,0}(t_2)^{-1} at k × k (rows × cols). padding < 0 selects it automatically.
inline Matrix moment_side_deformation(const MeasureMatrix& w, const TimePoint& t, int rows, int cols, int padding,
                                      int* used = nullptr) {
    t.validate();
    auto eval = [&](int p) {
        Matrix g = moment_block(w, rows + p, cols + p);
        return detail::series_deform(g, detail::exp_series(t.t1, p), detail::exp_series(t.t2, p, -1), rows, cols, p);
    };
    Real target = pow2(-static_cast<int>(Precision::bits()) + 20);  // relative series tail
    if (t.max_flow() == 0) {
        if (used) *used = 0;
        return moment_block(w, rows, cols);
    }
    if (padding >= 0) {
        Matrix a = eval(padding), b = eval(padding / 2);
        if (rel_diff(a, b) > target) throw TruncationInsufficient("padding " + std::to_string(padding) + " leaves the series unconverged");
        if (used) *used = padding;
        return a;
    }
    Matrix prev = eval(8);
    for (int p = 16; p <= 1024; p *= 2) {
        Matrix cur = eval(p);
        if (rel_diff(cur, prev) <= target) {
            if (used) *used = p;
            return cur;
        }
        prev = std::move(cur);
    }
    throw TruncationInsufficient("exponential series did not converge within 1024 padding rows");
}

inline DeformedMoments deformed_moment_matrix(const MeasureMatrix& w, const TimePoint& t, int k, int padding = -1) {
    DeformedMoments d;
    d.moment_side = moment_side_deformation(w, t, k, k, padding, &d.padding);
    d.measure_side = assemble_moment_matrix(deformed_measure(w, t), k);
    d.agreement = rel_diff(d.moment_side, d.measure_side);
    return d;
}

// G(t) = S1^{-1} H S2^{-T}; the upper wave factor is 𝒮2 = H S2^{-T}.
struct TodaState {
    TimePoint time;
    Factorization factorization;  // at size k + extra
    Matrix lax1, lax2;            // k × k, L1 = S1 Λ S1^{-1}, L2 = 𝒮2 Λ^T 𝒮2^{-1}
    bool lax1_hessenberg = false, lax2_hessenberg = false;
    int k = 0;

    // L1^j = S1 Λ^j S1^{-1}, L2^j = H (S2 Λ^j S2^{-1})^T H^{-1}; exact on rows/cols < size - j
    Matrix lax_power(int a, int j) const {
        const Factorization& f = factorization;
        int n = f.size();
        Matrix lj = Matrix::identity(n);
        Matrix sh = shift_matrix(n);
        for (int i = 0; i < j; ++i) lj = lj * sh;
        if (a == 1) return f.S1 * lj * unit_lower_inverse(f.S1);
        Matrix m = (f.S2 * lj * unit_lower_inverse(f.S2)).transpose();
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) m(r, c) *= f.h[r] / f.h[c];
        return m;
    }
};

inline TodaState evolve(const MeasureMatrix& w, const TimePoint& t, int k, int extra = 2) {
    TodaState s;
    s.time = t;
    s.k = k;
    Matrix g = assemble_moment_matrix(deformed_measure(w, t), k + extra);
    s.factorization = factorize(g);
    s.lax1 = s.lax_power(1, 1).block(0, 0, k, k);
    s.lax2 = s.lax_power(2, 1).block(0, 0, k, k);
    s.lax1_hessenberg = satisfies(s.lax1, {k, 1});
    s.lax2_hessenberg = satisfies(s.lax2, {1, k});
    return s;
}

namespace detail {
inline Matrix upper_part(const Matrix& m) {
    Matrix r = m;
    for (int i = 0; i < m.rows(); ++i)
        for (int j = 0; j < std::min(i, m.cols()); ++j) r(i, j) = 0;
    return r;
}
inline Matrix strictly_lower_part(const Matrix& m) { return m - upper_part(m); }

// B_{1,j} = (L1^j)_+, B_{2,j} = (L2^j)_-
inline Matrix generator(const TodaState& s, int a, int j) {
    Matrix p = s.lax_power(a, j);
    return a == 1 ? upper_part(p) : strictly_lower_part(p);
}

inline Real max_abs_block(const Matrix& m, int n) { return max_abs(m.block(0, 0, n, n)); }
}  // namespace detail

// Interior crop used by the flow checks: rows/cols < k - j
inline int toda_interior(int k, int j) { return std::max(1, k - j); }

// max over b of |dL_b/dt_{a,j} - [B_{a,j}, L_b]| on the interior block, central differences
inline Real lax_residual(const MeasureMatrix& w, const TimePoint& t, int a, int j, const Real& h, int k) {
    if (a != 1 && a != 2) throw ParameterOutOfRange("flow family must be 1 or 2");
    if (j < 1) throw ParameterOutOfRange("flow index must be >= 1");
    int extra = j + 2, n = toda_interior(k, j);
    TodaState s0 = evolve(w, t, k, extra);
    TodaState sp = evolve(w, t.shifted(a, j, h), k, extra), sm = evolve(w, t.shifted(a, j, -h), k, extra);
    Matrix b = detail::generator(s0, a, j);
    Real r = 0;
    for (int l = 1; l <= 2; ++l) {
        Matrix L = s0.lax_power(l, 1);
        Matrix dl = (sp.lax_power(l, 1) - sm.lax_power(l, 1)) * (1 / (2 * h));
        Matrix comm = b * L - L * b;
        r = std::max(r, detail::max_abs_block(dl - comm, n));
    }
    return r;
}

// ∂_{b,r} B_{a,j} - ∂_{a,j} B_{b,r} + [B_{a,j}, B_{b,r}] on the interior block
inline Real zakharov_shabat_residual(const MeasureMatrix& w, const TimePoint& t, std::pair<int, int> f1,
                                     std::pair<int, int> f2, const Real& h, int k) {
    auto [a, j] = f1;
    auto [b, r] = f2;
    int extra = std::max(j, r) + 2, n = toda_interior(k, std::max(j, r));
    TodaState s0 = evolve(w, t, k, extra);
    auto gen = [&](const TimePoint& tp, int fa, int fj) { return detail::generator(evolve(w, tp, k, extra), fa, fj); };
    Matrix ba = detail::generator(s0, a, j), bb = detail::generator(s0, b, r);
    Matrix dba = (gen(t.shifted(b, r, h), a, j) - gen(t.shifted(b, r, -h), a, j)) * (1 / (2 * h));
    Matrix dbb = (gen(t.shifted(a, j, h), b, r) - gen(t.shifted(a, j, -h), b, r)) * (1 / (2 * h));
    return detail::max_abs_block(dba - dbb + ba * bb - bb * ba, n);
}

// S1(t) W10 G W20^{-1} vs 𝒮2(t) = H S2^{-T}: the factorized form of G = W1(t)^{-1} W2(t)
inline Real wave_identity_residual(const MeasureMatrix& w, const TimePoint& t, int k) {
    TodaState s = evolve(w, t, k, 0);
    Matrix gt = moment_side_deformation(w, t, k, k, -1);
    Matrix lhs = s.factorization.S1 * gt;
    Matrix rhs = s.factorization.H() * unit_lower_inverse(s.factorization.S2).transpose();
    return rel_diff(lhs, rhs);
}

// W1(t) W1(t')^{-1} vs W2(t) W2(t')^{-1}; both reduce to S1(t) [·] S2(t')^T H(t')^{-1} with
// [·] = W10(t1 - t1') G(t') on the left and G(t) W20(t2 - t2') on the right
inline Real wave_relation_residual(const MeasureMatrix& w, const TimePoint& t, const TimePoint& tp, int k) {
    TodaState s = evolve(w, t, k, 0), sp = evolve(w, tp, k, 0);
    TimePoint d1, d2;
    for (auto& [j, v] : t.t1) d1.t1[j] += v;
    for (auto& [j, v] : tp.t1) d1.t1[j] -= v;
    for (auto& [j, v] : t.t2) d2.t2[j] += v;
    for (auto& [j, v] : tp.t2) d2.t2[j] -= v;
    // left middle: exp(Σ Δt1 Λ^j) G(t'); G(t') is the moment matrix of 𝒲(t')
    Matrix left = moment_side_deformation(deformed_measure(w, tp), d1, k, k, -1);
    // right middle: G(t) exp(Σ Δt2 Λ^{T j}) = G(t) W20(-Δt2)^{-1}
    TimePoint nd2;
    for (auto& [j, v] : d2.t2) nd2.t2[j] = -v;
    Matrix right = moment_side_deformation(deformed_measure(w, t), nd2, k, k, -1);
    Matrix tail = sp.factorization.S2.transpose() * inverse(sp.factorization.H());
    Matrix lhs = s.factorization.S1 * left * tail, rhs = s.factorization.S1 * right * tail;
    return rel_diff(lhs, rhs);
}

}  // namespace sob
