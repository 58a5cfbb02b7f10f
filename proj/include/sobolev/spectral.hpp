#pragma once

#include "perturbation.hpp"

namespace sob {

// prod (x - r_i)^{m_i}
struct GermSet {
    std::vector<std::pair<Real, int>> points;

    int degree() const {
        int m = 0;
        for (auto& p : points) m += p.second;
        return m;
    }
    bool empty() const { return points.empty(); }
    Polynomial polynomial() const { return Polynomial::from_roots(points); }
    void validate() const {
        for (std::size_t i = 0; i < points.size(); ++i) {
            if (points[i].second < 1) throw ParameterOutOfRange("germ multiplicity must be >= 1");
            for (std::size_t j = 0; j < i; ++j)
                if (points[i].first == points[j].first) throw ParameterOutOfRange("germ points must be distinct");
        }
    }
};

// Point-major, derivative-minor Taylor data f^{(t)}(r_i)/t!
inline Vector germ_vector(const Polynomial& f, const GermSet& g) {
    Vector v;
    for (auto& [r, m] : g.points) {
        auto t = f.taylor(r, m);
        v.insert(v.end(), t.begin(), t.end());
    }
    return v;
}

// rows: germ vectors of each polynomial
inline Matrix germ_matrix(const std::vector<Polynomial>& fs, const GermSet& g, int from, int count) {
    Matrix m(count, g.degree());
    for (int i = 0; i < count; ++i) {
        auto v = germ_vector(fs[from + i], g);
        for (int j = 0; j < g.degree(); ++j) m(i, j) = v[j];
    }
    return m;
}

// Germs of the second-kind functions C_{1,l} (slot 1) or C_{2,l} (slot 2), l < count.
inline Matrix second_kind_germ_matrix(const MeasureMatrix& w, const std::vector<Polynomial>& polys, int slot,
                                      const GermSet& g, int count) {
    std::vector<Polynomial> ps(polys.begin(), polys.begin() + count);
    Matrix m(count, g.degree());
    int col = 0;
    for (auto& [q, n] : g.points) {
        auto t = second_kind_germs(w, ps, slot, q, n);
        for (int i = 0; i < count; ++i)
            for (int s = 0; s < n; ++s) m(i, col + s) = t[i][s];
        col += n;
    }
    return m;
}

// 𝐐_{ij} = Q_{i+j+1}: χ(x)^T 𝐐 χ(y) = (Q(x) - Q(y)) / (x - y)
inline Matrix q_matrix(const Polynomial& q, int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; i + j + 1 <= q.degree() && j < n; ++j) m(i, j) = q[i + j + 1];
    return m;
}

struct GeronimusSpec {
    GermSet germ;
    // masses[i](a, b) weights f^{(a)}(q_i) h^{(b)}(q_i); empty list means no masses
    std::vector<Matrix> masses;

    int degree() const { return germ.degree(); }
    void validate() const {
        germ.validate();
        if (!masses.empty() && masses.size() != germ.points.size())
            throw ParameterOutOfRange("one mass matrix per Geronimus point");
        for (std::size_t i = 0; i < masses.size(); ++i)
            if (masses[i].rows() != germ.points[i].second || masses[i].cols() != germ.points[i].second)
                throw ParameterOutOfRange("mass matrix size must match the point multiplicity");
    }
    Matrix mass(std::size_t i) const {
        int n = germ.points[i].second;
        return masses.empty() ? Matrix(n, n) : masses[i];
    }
    // raw ξ̊_ab = a! b! ξ_ab
    Matrix raw_mass(std::size_t i) const {
        Matrix m = mass(i);
        for (int a = 0; a < m.rows(); ++a)
            for (int b = 0; b < m.cols(); ++b) m(a, b) *= factorial(a) * factorial(b);
        return m;
    }
    GeronimusSpec transposed() const {
        GeronimusSpec s{germ, {}};
        for (auto& m : masses) s.masses.push_back(m.transpose());
        return s;
    }
};

// Ξ = diag_i(ξ̊^{(i)} η T_i), T_i upper Toeplitz with Taylor data of Q/(x-q_i)^{n_i} at q_i
inline Matrix xi_matrix(const GeronimusSpec& g) {
    int n = g.degree();
    Matrix xi(n, n);
    Polynomial q = g.germ.polynomial();
    int off = 0;
    for (std::size_t i = 0; i < g.germ.points.size(); ++i) {
        auto [qi, ni] = g.germ.points[i];
        Polynomial qj = q.divmod(Polynomial{-qi, Real(1)}.pow(ni)).first;
        auto tay = qj.taylor(qi, ni);
        Matrix t(ni, ni), eta(ni, ni);
        for (int s = 0; s < ni; ++s) {
            eta(s, ni - 1 - s) = 1;
            for (int u = s; u < ni; ++u) t(s, u) = tay[u - s];
        }
        xi.set_block(off, off, g.raw_mass(i) * eta * t);
        off += ni;
    }
    return xi;
}

enum class Side { Left, Right };
enum class Orientation { RL, LR };

// Banded connection matrix with the transformed/original norm ratios it carries.
struct Resolvent {
    Matrix data;
    BandProfile profile;      // expected band (lower N, upper M)
    Vector ratio;             // ω_{k,k-N}
    bool band_ok = false;
    Real corner_defect = 0;   // max |ω_{k,k+M} - 1| and |ω_{k,k-N} - h̃_k/h_{k-N}| (relative)
};

struct Transformed {
    SBPS formula;         // quasi-determinant path
    SBPS direct;          // re-factorization of the deformed moment matrix
    Real agreement = 0;
    Resolvent resolvent;  // ω̃ = S̃_1 R(Λ) S_1^{-1} (k × (k+M))
    Matrix adjoint;       // Ω̃ = S_2 Q(Λ) S̃_2^{-1}, leading (k-N) block
    Real duality = 0;     // ω̃ vs H̃ Ω̃^T H^{-1}
    Real moment_identity = 0;  // R(Λ) G vs G̃ Q(Λ^T)
    SBPS base;            // untransformed sequence used by the formulas
    int M = 0, N = 0;
};

namespace detail {

inline SBPS flipped(SBPS s) {
    std::swap(s.p1, s.p2);
    return s;
}

inline Matrix coefficient_matrix(const std::vector<Polynomial>& ps, int n) {
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j <= ps[i].degree() && j < n; ++j) m(i, j) = ps[i][j];
    return m;
}

inline void check_coprime(const GermSet& r, const GermSet& q) {
    for (auto& a : r.points)
        for (auto& b : q.points)
            if (abs(a.first - b.first) <= tol() * std::max(Real(1), abs(a.first)))
                throw NotCoprime("R and Q share the root " + to_string(a.first, 20));
}

// derivatives 0..n of p(x)/Q(x) at x
inline std::vector<Real> rational_derivatives(const Polynomial& p, const Polynomial& q, const Real& x, int n) {
    std::vector<Real> g(n + 1), qd(n + 1);
    for (int r = 0; r <= n; ++r) qd[r] = q.derivative(r)(x);
    for (int r = 0; r <= n; ++r) {
        Real s = p.derivative(r)(x);
        for (int t = 0; t < r; ++t) s -= binomial(r, t) * g[t] * qd[r - t];
        g[r] = s / qd[0];
    }
    return g;
}

// (R x^i, x^j / Q; W) + Σ ξ_ab (R x^i)^{(a)}(q) (x^j)^{(b)}(q), i < rows, j < cols
inline Matrix deformed_moments_rl(const MeasureMatrix& w, const Polynomial& rpoly, const GeronimusSpec& g, int rows,
                                  int cols) {
    Polynomial q = g.germ.polynomial();
    if (q.degree() == 0) return moment_block(sandwich(x_operator(w.dim(), rpoly), w, PolyMatrix::identity(w.dim())), rows, cols);
    auto [lo, hi] = w.hull();
    for (auto& [qi, n] : g.germ.points)
        if (qi >= lo && qi <= hi) throw DomainError("Geronimus point inside the support hull");
    Matrix out(rows, cols);
    std::vector<Polynomial> left(rows);
    for (int i = 0; i < rows; ++i) left[i] = rpoly * Polynomial::monomial(i);
    for (int a = 0; a < w.dim(); ++a)
        for (int b = 0; b < w.dim(); ++b) {
            const Measure& m = w(a, b);
            if (m.is_zero()) continue;
            std::vector<Polynomial> la(rows);
            for (int i = 0; i < rows; ++i) la[i] = left[i].derivative(a);
            auto vals = integrate(m, rows * cols, [&](const Real& x, std::vector<Real>& o) {
                std::vector<Real> lv(rows), rv(cols);
                for (int i = 0; i < rows; ++i) lv[i] = la[i](x);
                for (int j = 0; j < cols; ++j) rv[j] = rational_derivatives(Polynomial::monomial(j), q, x, b)[b];
                for (int i = 0; i < rows; ++i)
                    for (int j = 0; j < cols; ++j) o[std::size_t(i) * cols + j] = lv[i] * rv[j];
            });
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j) out(i, j) += vals[std::size_t(i) * cols + j];
        }
    for (std::size_t p = 0; p < g.germ.points.size(); ++p) {
        Real qi = g.germ.points[p].first;
        Matrix xi = g.mass(p);
        for (int a = 0; a < xi.rows(); ++a)
            for (int b = 0; b < xi.cols(); ++b) {
                if (xi(a, b) == 0) continue;
                for (int i = 0; i < rows; ++i) {
                    Real fa = left[i].derivative(a)(qi);
                    for (int j = 0; j < cols; ++j) out(i, j) += xi(a, b) * fa * Polynomial::monomial(j).derivative(b)(qi);
                }
            }
    }
    return out;
}

// Solve B u = e_0 and wrap singularity.
inline Matrix germ_solve(const Matrix& b, const Matrix& rhs) {
    try {
        return solve(b, rhs);
    } catch (const SingularBlock&) {
        throw GermSingular("germ block in the quasi-determinant is singular");
    }
}

// Quasi-determinant path for R(𝒳) W Q(𝒳^T)^{-1} + masses, indices 0..k-1.
// c1 holds Π_q[C_{1,l}] for l < base size.
inline SBPS formula_rl(const SBPS& base, const GermSet& r, const GeronimusSpec& g, const Matrix& c1, int k) {
    int M = r.degree(), N = g.degree();
    Polynomial rp = r.polynomial(), qp = g.germ.polynomial();
    int nb = base.size();
    if (nb < k + M) throw TruncationInsufficient("base sequence too short for the transform");
    // Z_l = [Π_r[P1_l] | Π_q[C1_l] - Π_q[P1_l] Ξ]
    Matrix z(nb, M + N);
    if (M) z.set_block(0, 0, germ_matrix(base.p1, r, 0, nb));
    if (N) z.set_block(0, M, c1.block(0, 0, nb, N) - germ_matrix(base.p1, g.germ, 0, nb) * xi_matrix(g));
    // φ(x) = χ^{[N]}(x)^T 𝐐 Π_q[χ^{[N]}]
    std::vector<Polynomial> phi(N);
    if (N) {
        std::vector<Polynomial> mono;
        for (int i = 0; i < N; ++i) mono.push_back(Polynomial::monomial(i));
        Matrix a = q_matrix(qp, N) * germ_matrix(mono, g.germ, 0, N);
        for (int c = 0; c < N; ++c)
            for (int i = 0; i < N; ++i) phi[c] += Polynomial::monomial(i, a(i, c));
    }
    SBPS out;
    out.p1.resize(k);
    out.p2.resize(k);
    out.h.resize(k);
    auto divide_r = [&](const Polynomial& p) {
        auto [quo, rem] = p.divmod(rp);
        if (rem.max_abs() > check_tol() * std::max(Real(1), p.max_abs()))
            throw CheckFailed("connection polynomial not divisible by R");
        return quo;
    };

    // k >= N branch
    for (int n = N; n < k; ++n) {
        int w = N + M;
        Matrix b = z.block(n - N, 0, w, w);
        Matrix last = z.block(n + M, 0, 1, w);
        Matrix coef;  // last B^{-1}
        try {
            coef = solve_right(b, last);
        } catch (const SingularBlock&) {
            throw GermSingular("germ block in the quasi-determinant is singular");
        }
        Polynomial rp1 = base.p1[n + M];
        for (int i = 0; i < w; ++i) rp1 -= base.p1[n - N + i] * coef(0, i);
        out.p1[n] = divide_r(rp1);
        out.h[n] = -base.h[n - N] * coef(0, 0);
        // P̃2_n = h_{n-N} v(x) B^{-1} e_0, v = Q Σ_{l<m} P2_l h_l^{-1} Z_l + [0 | φ]
        Matrix e0(w, 1);
        e0(0, 0) = 1;
        Matrix u = germ_solve(b, e0);
        int m = N ? n : n + 1;
        Polynomial s;
        for (int l = 0; l < m; ++l) {
            Real c = 0;
            for (int i = 0; i < w; ++i) c += z(l, i) * u(i, 0);
            s += base.p2[l] * (c / base.h[l]);
        }
        Polynomial p2 = qp * s;
        for (int i = 0; i < N; ++i) p2 += phi[i] * u(M + i, 0);
        out.p2[n] = p2 * base.h[n - N];
    }

    // k < N branch: Π̊ = [Π_r[P1] | (Π_q[C1] - Π_q[P1]Ξ)(𝐐^{[N]}Π_q[χ^{[N]}])^{-1}], rows 0..N+M-1
    if (N > 0 && k > 0) {
        int w = N + M;
        int kk = std::min(k, N);
        std::vector<Polynomial> mono;
        for (int i = 0; i < N; ++i) mono.push_back(Polynomial::monomial(i));
        Matrix a = q_matrix(qp, N) * germ_matrix(mono, g.germ, 0, N);
        Matrix pr(w, w);
        if (M) pr.set_block(0, 0, z.block(0, 0, w, M));
        Matrix y;
        try {
            y = solve_right(a, z.block(0, M, w, N));
        } catch (const SingularBlock&) {
            throw GermSingular("𝐐 Π_q[χ] block is singular");
        }
        pr.set_block(0, M, y);
        Matrix omega(N, w);  // resolvent rows 0..N-1
        for (int n = 0; n < kk; ++n) {
            int d = n + M;
            Matrix coef(1, d);
            if (d > 0) {
                try {
                    coef = solve_right(pr.lead(d), pr.block(d, 0, 1, d));
                } catch (const SingularBlock&) {
                    throw GermSingular("Π̊ leading block is singular");
                }
            }
            Polynomial rp1 = base.p1[d];
            for (int i = 0; i < d; ++i) rp1 -= base.p1[i] * coef(0, i);
            out.p1[n] = divide_r(rp1);
            Real th = pr(d, d);
            for (int i = 0; i < d; ++i) th -= coef(0, i) * pr(i, d);
            out.h[n] = -th;
            for (int i = 0; i < d; ++i) omega(n, i) = -coef(0, i);
            omega(n, d) = 1;
        }
        Matrix u = omega * y;  // N × N
        for (int n = 0; n < kk; ++n) {
            std::vector<Real> c(n + 1, Real(0));
            c[n] = 1;
            if (n > 0) {
                Matrix ut = u.transpose();
                Matrix coef;
                try {
                    coef = solve_right(ut.lead(n), ut.block(n, 0, 1, n));
                } catch (const SingularBlock&) {
                    throw GermSingular("Π̊ leading block is singular");
                }
                for (int i = 0; i < n; ++i) c[i] = -coef(0, i);
            }
            out.p2[n] = Polynomial(std::move(c));
        }
    }
    return out;
}

inline Resolvent make_resolvent(Matrix data, int N, int M, const Vector& ht, const Vector& h) {
    Resolvent r;
    r.profile = {N, M};
    r.band_ok = satisfies(data, r.profile);
    for (int i = 0; i < data.rows(); ++i) {
        if (i + M < data.cols()) r.corner_defect = std::max(r.corner_defect, abs(data(i, i + M) - 1));
        if (i - N >= 0) {
            r.ratio.push_back(data(i, i - N));
            Real want = ht[i] / h[i - N];
            r.corner_defect = std::max(r.corner_defect, abs(data(i, i - N) - want) / std::max(abs(want), Real(1)));
        }
    }
    r.data = std::move(data);
    return r;
}

// Shared R·W·Q^{-1} core; all public transforms reduce to it (R-side ones via transposition).
inline Transformed transform_rl(const MeasureMatrix& w, const GermSet& r, const GeronimusSpec& g, int k) {
    r.validate();
    g.validate();
    check_coprime(r, g.germ);
    if (k < 1) throw ParameterOutOfRange("size must be >= 1");
    int M = r.degree(), N = g.degree();
    Polynomial rp = r.polynomial(), qp = g.germ.polynomial();
    Transformed t;
    t.M = M;
    t.N = N;
    int nb = k + M;
    Matrix g0 = assemble_moment_matrix(w, nb);
    Factorization f0 = factorize(g0);
    t.base = sbps_from(g0, f0);

    Matrix gt = deformed_moments_rl(w, rp, g, k, k);
    Factorization ft = factorize(gt);
    t.direct = sbps_from(gt, ft);

    if (M == 0 && N == 0) {
        t.formula = truncated(t.base, k);
    } else {
        Matrix c1;
        if (N) c1 = second_kind_germ_matrix(w, t.base.p1, 1, g.germ, nb);
        t.formula = formula_rl(t.base, r, g, c1, k);
    }
    t.agreement = sbps_distance(t.formula, t.direct);

    // ω̃ = S̃1 R(Λ) S1^{-1}
    Matrix rl = poly_of(rp, shift_matrix(nb));
    Matrix s1inv = unit_lower_inverse(f0.S1);
    Matrix st1(k, nb);
    st1.set_block(0, 0, ft.S1);
    t.resolvent = make_resolvent(st1 * rl * s1inv, N, M, ft.h, f0.h);

    // Ω̃ = S2 Q(Λ) S̃2^{-1} on the leading (k-N) block, compared with H̃^{-1} ω̃^T H ... transposed
    int kd = k - N;
    if (kd > 0) {
        Matrix ql = poly_of(qp, shift_matrix(k));
        Matrix s2 = f0.S2.block(0, 0, kd, k);
        t.adjoint = s2 * ql * unit_lower_inverse(ft.S2);
        t.adjoint = t.adjoint.block(0, 0, kd, kd);
        Matrix lhs = t.resolvent.data.block(0, 0, kd, kd);
        Matrix rhs = Matrix::diag(Vector(ft.h.begin(), ft.h.begin() + kd)) * t.adjoint.transpose() *
                     inverse(Matrix::diag(Vector(f0.h.begin(), f0.h.begin() + kd)));
        t.duality = rel_diff(lhs, rhs);
    }

    // R(Λ) G = G̃ Q(Λ^T) on rows < k, columns < k - N
    if (kd > 0) {
        Matrix lhs = (rl * g0).block(0, 0, k, kd);
        Matrix wide = deformed_moments_rl(w, rp, g, k, k);
        Matrix qt = poly_of(qp, shift_matrix(k)).transpose();
        Matrix rhs = (wide * qt).block(0, 0, k, kd);
        t.moment_identity = rel_diff(lhs, rhs);
    }
    return t;
}

inline Transformed flip(Transformed t) {
    t.formula = flipped(std::move(t.formula));
    t.direct = flipped(std::move(t.direct));
    t.base = flipped(std::move(t.base));
    return t;
}

}  // namespace detail

// Left: R(𝒳) W (acts on the first slot). Right: W R(𝒳^T).
inline Transformed christoffel(const MeasureMatrix& w, const GermSet& r, Side side, int k) {
    if (side == Side::Left) return detail::transform_rl(w, r, GeronimusSpec{}, k);
    return detail::flip(detail::transform_rl(w.transpose(), r, GeronimusSpec{}, k));
}

// Right: W Q(𝒳^T)^{-1} + masses. Left: Q(𝒳)^{-1} W + masses.
inline Transformed geronimus(const MeasureMatrix& w, const GeronimusSpec& g, Side side, int k) {
    if (side == Side::Right) return detail::transform_rl(w, GermSet{}, g, k);
    return detail::flip(detail::transform_rl(w.transpose(), GermSet{}, g.transposed(), k));
}

// RL: R(𝒳) W̌_R.  LR: w̌_L R(𝒳^T).
inline Transformed spectral(const MeasureMatrix& w, const GermSet& r, const GeronimusSpec& g, Orientation o, int k) {
    if (o == Orientation::RL) return detail::transform_rl(w, r, g, k);
    return detail::flip(detail::transform_rl(w.transpose(), r, g.transposed(), k));
}

// Formula path of the left Christoffel transform from an SBPS alone (no measure needed).
inline SBPS christoffel_formula(const SBPS& base, const GermSet& r, Side side, int k) {
    if (side == Side::Left) return detail::formula_rl(base, r, GeronimusSpec{}, Matrix(), k);
    return detail::flipped(detail::formula_rl(detail::flipped(base), r, GeronimusSpec{}, Matrix(), k));
}

// Zero-block pattern of Υ_k: rows split M|N, columns N|M.
inline Matrix upsilon(const Transformed& t, int k) {
    int M = t.M, N = t.N, w = M + N;
    const Matrix& om = t.resolvent.data;
    if (k + N > om.rows() || k < M || k < N) throw ParameterOutOfRange("kernel index outside the resolvent window");
    Matrix u(w, w);
    for (int a = 0; a < M; ++a)
        for (int b = 0; b < M; ++b) u(a, N + b) = -om(k - M + a, k + b) / t.direct.h[k - M + a];
    for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) u(M + a, b) = om(k + a, k - N + b) / t.direct.h[k + a];
    return u;
}

// R(y) K̃^{[k]}(x,y) - Q(x) K^{[k]}(x,y) + P̃2_{k-M..k+N-1}(x) Υ_k P1_{k-N..k+M-1}(y), RL orientation
inline Real spectral_kernel_link(const Transformed& t, const Polynomial& rpoly, const Polynomial& qpoly, int k,
                                 const Real& x, const Real& y) {
    Matrix u = upsilon(t, k);
    int M = t.M, N = t.N;
    Real lhs = rpoly(y) * kernel_derivatives(t.direct, k, x, y, 0, 0);
    Real rhs = qpoly(x) * kernel_derivatives(t.base, k, x, y, 0, 0);
    Real corr = 0;
    for (int a = 0; a < M + N; ++a)
        for (int b = 0; b < M + N; ++b)
            if (u(a, b) != 0) corr += t.direct.p2[k - M + a](x) * u(a, b) * t.base.p1[k - N + b](y);
    Real scale = std::max({Real(1), abs(lhs), abs(rhs)});
    return abs(lhs - rhs + corr) / scale;
}

// Left Christoffel: K^{[n+1]}(x,y) = R(y) K̂^{[n+1]}(x,y) - Σ_i P̂_{2,i}(x) ĥ_i^{-1} Σ_j ω̂_{ij} P_{1,j}(y)
inline Real christoffel_kernel_link(const MeasureMatrix& w, const GermSet& r, int n, const Real& x, const Real& y) {
    if (r.degree() == 0) {
        Transformed t = christoffel(w, r, Side::Left, n + 1);
        return abs(kernel_derivatives(t.base, n + 1, x, y, 0, 0) - kernel_derivatives(t.direct, n + 1, x, y, 0, 0));
    }
    Transformed t = christoffel(w, r, Side::Left, n + 1);
    return spectral_kernel_link(t, r.polynomial(), Polynomial(1), n + 1, x, y);
}

// Quasi-recurrence matrices from the L and R transforms of the same W:
// Christoffel Ĵ_1LR = ω̂_L Ω̂_R, Ĵ_2RL = ω̂_R Ω̂_L; Geronimus J̌_1RL = Š_1R Q(Λ) Š_1L^{-1}, J̌_2LR = Š_2L Q(Λ) Š_2R^{-1}.
struct QuasiRecurrence {
    Matrix J1, J2;
    BandProfile band;        // observed band of J1
    int expected_half = 0;   // M (Christoffel) or N (Geronimus)
    bool band_ok = false;
    Real h_link = 0;         // J1 vs H_a J2^T H_b^{-1}
    Real eigen_residual = 0; // J1 P_a(x_s) vs Poly(x_s) P_b(x_s) at sample points
};

namespace detail {
inline Real sample_residual(const Matrix& j, const std::vector<Polynomial>& wide, const std::vector<Polynomial>& narrow,
                            const Polynomial& poly, const std::vector<Real>& xs) {
    Real r = 0;
    for (auto& x : xs) {
        for (int i = 0; i < j.rows(); ++i) {
            Real s = 0, sc = 0;
            for (int c = 0; c < j.cols(); ++c) {
                Real v = j(i, c) * wide[c](x);
                s += v;
                sc = std::max(sc, abs(v));
            }
            Real rhs = poly(x) * narrow[i](x);
            r = std::max(r, abs(s - rhs) / std::max({Real(1), sc, abs(rhs)}));
        }
    }
    return r;
}
}  // namespace detail

inline QuasiRecurrence christoffel_quasi_recurrence(const MeasureMatrix& w, const GermSet& r, int k,
                                                    const std::vector<Real>& xs) {
    int M = r.degree(), kk = k + M;
    Polynomial rp = r.polynomial();
    Matrix g = assemble_moment_matrix(w, kk + M);
    Matrix rl = poly_of(rp, shift_matrix(kk + M));
    Matrix gl = (rl * g).block(0, 0, kk, kk), gr = (g * rl.transpose()).block(0, 0, kk, kk);
    auto f0 = factorize(g.lead(kk));
    auto fl = factorize(gl), fr = factorize(gr);
    // ω̂_L = Ŝ_L1 R(Λ) S1^{-1}, Ω̂_R = S1 Ŝ_R1^{-1}; ω̂_R = Ŝ_R2 R(Λ) S2^{-1}, Ω̂_L = S2 Ŝ_L2^{-1}
    Matrix wl = fl.S1.block(0, 0, k, kk) * rl.block(0, 0, kk, kk) * unit_lower_inverse(f0.S1);
    Matrix wr = fr.S2.block(0, 0, k, kk) * rl.block(0, 0, kk, kk) * unit_lower_inverse(f0.S2);
    Matrix omr = (f0.S1 * unit_lower_inverse(fr.S1)).block(0, 0, kk, k);
    Matrix oml = (f0.S2 * unit_lower_inverse(fl.S2)).block(0, 0, kk, k);
    QuasiRecurrence q;
    q.J1 = wl * omr;
    q.J2 = wr * oml;
    q.expected_half = M;
    q.band = band_of(q.J1);
    q.band_ok = satisfies(q.J1, {M, M}) && satisfies(q.J2, {M, M});
    Matrix hl = Matrix::diag(Vector(fl.h.begin(), fl.h.begin() + k));
    Matrix hr = Matrix::diag(Vector(fr.h.begin(), fr.h.begin() + k));
    q.h_link = rel_diff(q.J1, hl * q.J2.transpose() * inverse(hr));
    // Ĵ_1LR P̂_R1 = R P̂_L1 on rows whose band stays inside the truncation
    int rows = std::max(0, k - M);
    auto pr = rows_as_polynomials(fr.S1), pl = rows_as_polynomials(fl.S1);
    q.eigen_residual = detail::sample_residual(q.J1.block(0, 0, rows, k), pr, pl, rp, xs);
    return q;
}

inline QuasiRecurrence geronimus_quasi_recurrence(const MeasureMatrix& w, const GeronimusSpec& g, int k,
                                                  const std::vector<Real>& xs) {
    int N = g.degree(), kk = k + N;
    Polynomial qp = g.germ.polynomial();
    Matrix gr = detail::deformed_moments_rl(w, Polynomial(1), g, kk, kk);
    Matrix gl = detail::deformed_moments_rl(w.transpose(), Polynomial(1), g.transposed(), kk, kk).transpose();
    auto fl = factorize(gl), fr = factorize(gr);
    Matrix ql = poly_of(qp, shift_matrix(kk));
    QuasiRecurrence q;
    q.J1 = (fr.S1 * ql * unit_lower_inverse(fl.S1)).block(0, 0, k, k);
    q.J2 = (fl.S2 * ql * unit_lower_inverse(fr.S2)).block(0, 0, k, k);
    q.expected_half = N;
    q.band = band_of(q.J1);
    q.band_ok = satisfies(q.J1, {N, N}) && satisfies(q.J2, {N, N});
    // J̌_1RL Ȟ_L = Ȟ_R J̌_2LR^T
    Matrix hl = Matrix::diag(Vector(fl.h.begin(), fl.h.begin() + k));
    Matrix hr = Matrix::diag(Vector(fr.h.begin(), fr.h.begin() + k));
    q.h_link = rel_diff(q.J1 * hl, hr * q.J2.transpose());
    int rows = std::max(0, k - N);
    auto pl = rows_as_polynomials(fl.S1), pr = rows_as_polynomials(fr.S1);
    q.eigen_residual = detail::sample_residual(q.J1.block(0, 0, rows, k), pl, pr, qp, xs);
    return q;
}

}  // namespace sob
