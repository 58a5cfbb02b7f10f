#pragma once

#include "sobolev.hpp"

namespace sob {

// ---- symbolic density class: factor(x) * u(x), u a Pearson base ----

namespace detail {

inline bool vanishes_at(const Polynomial& p, const Real& x) {
    return abs(p(x)) <= tol() * std::max(p.max_abs(), Real(1)) * 64;
}

inline Polynomial divide_exact(const Polynomial& p, const Polynomial& d) { return p.divmod(d).first; }

inline void require_plain(const Term& t) {
    if (!t.tilt.is_zero()) throw NotClosedUnderMove("tilted densities are outside the symbolic class");
}

}  // namespace detail

// d/dx of factor·u as another term of the class
inline Term density_derivative(const Term& t) {
    using K = PearsonFamily::Kind;
    detail::require_plain(t);
    const Polynomial& f = t.factor;
    Term out = t;
    switch (t.base.kind) {
        case K::Uniform: out.factor = f.derivative(); break;
        case K::Hermite: out.factor = f.derivative() + f * t.base.p1(); break;
        case K::Laguerre: {
            Polynomial g = f.derivative() * Polynomial::x() + f * t.base.p1();
            if (detail::vanishes_at(g, Real(0))) {
                out.factor = detail::divide_exact(g, Polynomial::x());
            } else {
                if (!(t.base.alpha > 0)) throw NotClosedUnderMove("derivative leaves the Laguerre class");
                out.base = PearsonFamily::laguerre(t.base.alpha - 1);
                out.factor = g;
            }
            break;
        }
        case K::Jacobi: {
            // g (1-x)^{α-1} (1+x)^{β-1}
            Polynomial g = f.derivative() * t.base.p2() + f * t.base.p1();
            Real a = t.base.alpha - 1, b = t.base.beta - 1;
            if (detail::vanishes_at(g, Real(1))) {
                g = detail::divide_exact(g, Polynomial{Real(1), Real(-1)});
                a += 1;
            }
            if (detail::vanishes_at(g, Real(-1))) {
                g = detail::divide_exact(g, Polynomial{Real(1), Real(1)});
                b += 1;
            }
            if (!(a > -1 && b > -1)) throw NotClosedUnderMove("derivative leaves the Jacobi class");
            out.base = PearsonFamily::jacobi(a, b);
            out.factor = g;
            break;
        }
    }
    out.factor = Polynomial(out.factor.coeffs());
    return out;
}

// δ(factor·u): +value at the upper end, -value at the lower end (finite ends only)
inline Measure boundary_measure(const Term& t) {
    using K = PearsonFamily::Kind;
    detail::require_plain(t);
    const Polynomial& f = t.factor;
    Measure m;
    auto end_value = [&](const Real& x, const Real& expo, const Real& other) -> Real {
        // (distance)^expo * other * f(x)
        if (expo > 0) return 0;
        if (expo == 0) return other * f(x);
        if (detail::vanishes_at(f, x)) return 0;
        throw NotClosedUnderMove("density is unbounded at the boundary");
    };
    switch (t.base.kind) {
        case K::Hermite: break;
        case K::Laguerre: m += Measure::point(Real(0), -end_value(Real(0), t.base.alpha, Real(1))); break;
        case K::Jacobi:
            m += Measure::point(Real(1), end_value(Real(1), t.base.alpha, pow(Real(2), t.base.beta)));
            m += Measure::point(Real(-1), -end_value(Real(-1), t.base.beta, pow(Real(2), t.base.alpha)));
            break;
        case K::Uniform:
            m += Measure::point(t.base.beta, f(t.base.beta));
            m += Measure::point(t.base.alpha, -f(t.base.alpha));
            break;
    }
    return m;
}

inline Measure continuous_part(const Measure& m) {
    Measure c;
    c.terms = m.terms;
    return c;
}
inline Measure atomic_part(const Measure& m) {
    Measure c;
    c.atoms = m.atoms;
    return c;
}

inline Measure derivative_measure(const Measure& m) {
    Measure d;
    for (auto& t : m.terms) {
        Term dt = density_derivative(t);
        Measure x;
        x.terms.push_back(dt);
        x.prune();
        d += x;
    }
    return d;
}
inline Measure boundary_measure(const Measure& m) {
    Measure d;
    for (auto& t : m.terms) d += boundary_measure(t);
    return d;
}

// primitive vanishing at the lower end; only for polynomial densities on a bounded interval
inline Measure antiderivative_measure(const Measure& m) {
    Measure d;
    for (auto& t : m.terms) {
        detail::require_plain(t);
        Term it = t;
        if (t.base.kind == PearsonFamily::Kind::Uniform) {
            it.factor = t.factor.antiderivative(t.base.alpha);
        } else if (t.base.kind == PearsonFamily::Kind::Jacobi && t.base.alpha == 0 && t.base.beta == 0) {
            it.factor = t.factor.antiderivative(Real(-1));
        } else {
            throw NotClosedUnderMove("antiderivative only supported for polynomial densities on an interval");
        }
        Measure x;
        x.terms.push_back(it);
        x.prune();
        d += x;
    }
    return d;
}

// ---- elementary moves ----

enum class MoveKind { ShiftUpRow, ShiftLeftColumn, AntiderivativeSpread };

struct ElementaryMove {
    int i = 0, j = 0;
    MoveKind kind = MoveKind::ShiftUpRow;
    Measure boundary;  // produced δ-part (filled by apply_move)
};

inline Real moment_mismatch(const MeasureMatrix& a, const MeasureMatrix& b, int k) {
    Matrix ga = assemble_moment_matrix(a, k), gb = assemble_moment_matrix(b, k);
    return rel_diff(ga, gb);
}

inline MeasureMatrix apply_move_unchecked(const MeasureMatrix& w, ElementaryMove& mv) {
    if (mv.i < 0 || mv.j < 0 || mv.i > w.order() || mv.j > w.order()) throw ParameterOutOfRange("move target outside the matrix");
    Measure omega = continuous_part(w(mv.i, mv.j));
    mv.boundary = Measure{};
    if (omega.is_zero()) return w;
    MeasureMatrix out = w.padded(w.order() + 1);
    out(mv.i, mv.j) = atomic_part(w(mv.i, mv.j));
    switch (mv.kind) {
        case MoveKind::ShiftUpRow: {
            if (mv.i < 1) throw ParameterOutOfRange("row move needs i >= 1");
            mv.boundary = boundary_measure(omega);
            out(mv.i - 1, mv.j) += -derivative_measure(omega) + mv.boundary;
            out(mv.i - 1, mv.j + 1) += -omega;
            break;
        }
        case MoveKind::ShiftLeftColumn: {
            if (mv.j < 1) throw ParameterOutOfRange("column move needs j >= 1");
            mv.boundary = boundary_measure(omega);
            out(mv.i, mv.j - 1) += -derivative_measure(omega) + mv.boundary;
            out(mv.i + 1, mv.j - 1) += -omega;
            break;
        }
        case MoveKind::AntiderivativeSpread: {
            Measure prim = antiderivative_measure(omega);
            mv.boundary = boundary_measure(prim);
            out(mv.i, mv.j) += mv.boundary;
            out(mv.i, mv.j + 1) += -prim;
            out(mv.i + 1, mv.j) += -prim;
            break;
        }
    }
    return out.trimmed();
}

// Applies the move and checks that G^{[8]} is unchanged.
inline MeasureMatrix apply_move(const MeasureMatrix& w, ElementaryMove& mv, int check_size = 8) {
    MeasureMatrix out = apply_move_unchecked(w, mv);
    if (moment_mismatch(w, out, check_size) > check_tol()) throw CheckFailed("elementary move changed the moment matrix");
    return out;
}

// ---- diagonal reduction of symmetric measure matrices ----

inline bool is_symmetric(const MeasureMatrix& w, int probe = 12) {
    for (int i = 0; i < w.dim(); ++i)
        for (int j = 0; j < i; ++j) {
            auto a = raw_moments(w(i, j), probe), b = raw_moments(w(j, i), probe);
            for (int n = 0; n < probe; ++n)
                if (abs(a[n] - b[n]) > check_tol() * std::max({abs(a[n]), abs(b[n]), Real(1)})) return false;
        }
    return true;
}

struct DiagonalReduction {
    MeasureMatrix diagonal, discrete;
    std::vector<ElementaryMove> trace;
};

// Last-row / last-column sweeps; each sweep zeroes the outermost row and column off the diagonal.
inline DiagonalReduction reduce_to_diagonal(const MeasureMatrix& w) {
    if (!is_symmetric(w)) throw ParameterOutOfRange("reduction requires a symmetric measure matrix");
    MeasureMatrix cur = w;
    DiagonalReduction r;
    for (int n = w.order(); n >= 1; --n) {
        for (int j = 0; j < n; ++j) {
            if (continuous_part(cur(n, j)).is_zero()) continue;
            ElementaryMove mv{n, j, MoveKind::ShiftUpRow, {}};
            cur = apply_move_unchecked(cur, mv).padded(w.order());
            r.trace.push_back(mv);
        }
        for (int i = 0; i < n; ++i) {
            if (continuous_part(cur(i, n)).is_zero()) continue;
            ElementaryMove mv{i, n, MoveKind::ShiftLeftColumn, {}};
            cur = apply_move_unchecked(cur, mv).padded(w.order());
            r.trace.push_back(mv);
        }
    }
    r.diagonal = MeasureMatrix(w.order());
    r.discrete = MeasureMatrix(w.order());
    for (int i = 0; i <= w.order(); ++i)
        for (int j = 0; j <= w.order(); ++j) {
            Measure c = continuous_part(cur(i, j));
            if (i != j && !c.is_zero()) throw CheckFailed("off-diagonal continuous part survived the reduction");
            if (i == j) r.diagonal(i, i) = c;
            r.discrete(i, j) = atomic_part(cur(i, j));
        }
    if (moment_mismatch(w, r.diagonal + r.discrete, 11) > check_tol()) throw CheckFailed("reduction changed the moment matrix");
    return r;
}

// ---- tilde-omega property: δ ω^{(t)} = 0 for t < k ----

inline bool tilde_omega_check(const Measure& m, int k) {
    Measure cur = continuous_part(m);
    for (int t = 0; t < k; ++t) {
        if (cur.is_zero()) return true;
        try {
            Measure b = boundary_measure(cur);
            for (auto& a : b.atoms)
                if (abs(a.mass) > check_tol()) return false;
            if (t + 1 < k) cur = derivative_measure(cur);
        } catch (const NotClosedUnderMove&) {
            return false;
        }
    }
    return true;
}

// ---- operator F for diag(v_r u_{γ+r}) ----

struct OperatorF {
    DiffOperator op;
    Matrix F;          // moment-side face, k × k
    Matrix U, JF;      // S_𝒲 F S_γ^{-1}, S_𝒲 F S_𝒲^{-1}
    BandProfile u_band, j_band;
    MeasureMatrix w;   // diag(v_r p2^r u_γ)
    Real g_residual = 0;     // |G_𝒲 - F g_γ|, relative
    Real sym_residual = 0;   // |F g_γ - g_γ F^T|, relative
    Real fg_residual = 0;    // |F G_𝒲 - G_𝒲 F^T|, relative
    Real u_lower = 0;        // largest strictly-lower entry of U, relative
    Real j_duality = 0;      // |J_F H - H J_F^T|, relative
};

inline OperatorF build_operator_F(const PearsonFamily& fam, const std::vector<Polynomial>& v, int k) {
    if (!fam.classical()) throw NotClassical("operator F needs a classical family");
    if (v.empty()) throw ParameterOutOfRange("need at least v_0");
    int n = static_cast<int>(v.size()) - 1;
    OperatorF r;
    r.w = MeasureMatrix(n);
    Polynomial p2 = fam.p2();
    for (int s = 0; s <= n; ++s) {
        r.w(s, s) = Measure::continuous(fam, v[s] * p2.pow(s));
        if (!tilde_omega_check(r.w(s, s), s)) throw TildeOmegaViolation("entry " + std::to_string(s) + " is not of tilde-omega type");
    }
    // F = Σ_r (-1)^r Σ_j C(r,j) (𝒪_{j+1}∘…∘𝒪_r)[v_r] p2^j d^{r+j}
    r.op.coef.assign(2 * n + 1, Polynomial());
    for (int s = 0; s <= n; ++s)
        for (int j = 0; j <= s; ++j) {
            Polynomial psi = pearson_step_operator(fam, s, j + 1)(v[s]) * p2.pow(j) * binomial(s, j);
            r.op.coef[s + j] += (s % 2 ? -psi : psi);
        }
    int band = 0;
    for (int s = 0; s <= r.op.order(); ++s) band = std::max(band, r.op.coef[s].degree());
    int kk = k + band + 1;
    Matrix fwide = moment_face(r.op, k, kk);
    Matrix gg = assemble_moment_matrix(MeasureMatrix::scalar(Measure::continuous(fam)), kk);
    Matrix gw = assemble_moment_matrix(r.w, kk);
    r.F = fwide.lead(k);
    Matrix fg = fwide * gg.block(0, 0, kk, k);
    Matrix gft = gg.block(0, 0, k, kk) * fwide.transpose();
    r.g_residual = rel_diff(gw.lead(k), fg);
    r.sym_residual = rel_diff(fg, gft);
    r.fg_residual = rel_diff(fwide * gw.block(0, 0, kk, k), gw.block(0, 0, k, kk) * fwide.transpose());

    Factorization fw = factorize(gw), fgm = factorize(gg);
    Matrix sw = fw.S1.lead(k);
    r.U = sw * fwide * unit_lower_inverse(fgm.S1).block(0, 0, kk, k);
    r.JF = sw * fwide * unit_lower_inverse(fw.S1).block(0, 0, kk, k);
    Real su = max_abs(r.U);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < i; ++j) r.u_lower = std::max(r.u_lower, abs(r.U(i, j)) / su);
    r.u_band = band_of(r.U, check_tol());
    r.j_band = band_of(r.JF, check_tol());
    Matrix h = Matrix::diag(Vector(fw.h.begin(), fw.h.begin() + k));
    r.j_duality = rel_diff(r.JF * h, h * r.JF.transpose());
    return r;
}

}  // namespace sob
