#pragma once

#include "sobolev.hpp"

namespace sob {

// highest column shift n - s over the terms of op
inline int face_reach(const DiffOperator& op) {
    int d = 0;
    for (int s = 0; s <= op.order(); ++s)
        if (!op.coef[s].is_zero()) d = std::max(d, op.coef[s].degree() - s);
    return d;
}

// Σ a_{n,r} (Λ^T)^r 𝒳^n on a derivative stack of the given size
inline PolyMatrix measure_face(const DiffOperator& op, int dim) {
    PolyMatrix out(dim, dim, Polynomial());
    for (int r = 0; r <= op.order(); ++r) {
        if (op.coef[r].is_zero()) continue;
        PolyMatrix x = x_operator(dim, op.coef[r]);
        for (int a = r; a < dim; ++a)
            for (int b = 0; b < dim; ++b) out(a, b) += x(a - r, b);
    }
    return out;
}

struct OperatorMatrices {
    Matrix moment_side;   // k × (k + reach)
    PolyMatrix measure_side;
    int reach = 0;
};

inline OperatorMatrices operator_matrices(const DiffOperator& op, int k, int dim) {
    OperatorMatrices m;
    m.reach = face_reach(op);
    m.moment_side = moment_face(op, k, k + m.reach);
    m.measure_side = measure_face(op, dim + std::max(0, op.order()));
    return m;
}

// 𝓛1 W 𝓛2^T, with W padded to hold the raised derivative orders
inline MeasureMatrix deform_measure(const DiffOperator& l1, const MeasureMatrix& w, const DiffOperator& l2) {
    int dim = w.dim() + std::max(l1.order(), l2.order());
    MeasureMatrix p = w.padded(dim - 1);
    return sandwich(measure_face(l1, dim), p, measure_face(l2, dim));
}

// L1 G L2^T at truncation k, using enough of G to cover the band
inline Matrix deform_moments(const DiffOperator& l1, const MeasureMatrix& w, const DiffOperator& l2, int k) {
    int reach = std::max(face_reach(l1), face_reach(l2));
    Matrix g = assemble_moment_matrix(w, k + reach);
    return moment_face(l1, k, k + reach) * g * moment_face(l2, k, k + reach).transpose();
}

struct OpdoMeasure {
    MeasureMatrix w;
    Real residual = 0;  // max relative gap of <L1 f, L2 h>_μ vs (f, h; W) on monomials
};

// entries p_{1,i} p_{2,j} dμ
inline OpdoMeasure opdo_measure_matrix(const DiffOperator& l1, const DiffOperator& l2, const Measure& base,
                                       int check_degree = 8) {
    int n = std::max(l1.order(), l2.order());
    OpdoMeasure out{MeasureMatrix(std::max(n, 0)), 0};
    for (int i = 0; i <= n; ++i)
        for (int j = 0; j <= n; ++j) {
            Polynomial c = l1.at(i) * l2.at(j);
            if (!c.is_zero()) out.w(i, j) = c * base;
        }
    out.w = out.w.trimmed();
    MeasureMatrix b = MeasureMatrix::scalar(base);
    for (int a = 0; a <= check_degree; ++a)
        for (int c = 0; c <= check_degree; ++c) {
            Polynomial f = Polynomial::monomial(a), h = Polynomial::monomial(c);
            Real lhs = bilinear(l1(f), l2(h), b), rhs = bilinear(f, h, out.w);
            out.residual = std::max(out.residual, abs(lhs - rhs) / std::max({Real(1), abs(lhs), abs(rhs)}));
        }
    return out;
}

// Pointwise LDU of W(x) = F(x) dμ: (f,h;W) = Σ_k ∫ (L_k f)(U_k h) d_k dμ
struct GeneralizedDiagonal {
    std::vector<DiffOperator> lower, upper;  // L_k f = Σ_j l_{jk} f^{(j)}, U_k h = Σ_j u_{kj} h^{(j)}
    std::vector<Measure> diagonal;
    PolyMatrix L, U;
    std::vector<Polynomial> d;
    bool degree_condition = false;  // j - deg u_{kj} > k for all j > k
    Real residual = 0;
};

namespace detail {
// common base (family, tilt) of every continuous entry; rejects atoms
inline Term common_base(const MeasureMatrix& w) {
    std::optional<Term> base;
    for (int i = 0; i < w.dim(); ++i)
        for (int j = 0; j < w.dim(); ++j) {
            const Measure& m = w(i, j);
            if (m.is_zero()) continue;
            if (!m.atoms.empty() || m.terms.size() != 1)
                throw DomainError("pointwise factorization needs one continuous term per entry");
            const Term& t = m.terms[0];
            if (base && !(base->base == t.base && base->tilt == t.tilt))
                throw DomainError("entries must share one base density");
            if (!base) base = t;
        }
    if (!base) throw DomainError("zero measure matrix");
    return *base;
}

inline Polynomial exact_divide(const Polynomial& a, const Polynomial& b, const char* what) {
    auto [q, r] = a.divmod(b);
    if (r.max_abs() > tol() * std::max(Real(1), a.max_abs())) throw NonPolynomialFactor(what);
    return q;
}

// sample points inside the support for nonvanishing checks
inline std::vector<Real> support_samples(const PearsonFamily& f, int n = 33) {
    Real lo = f.lo() ? *f.lo() : Real(-20), hi = f.hi() ? *f.hi() : Real(20);
    if (!f.lo() && f.hi()) lo = hi - 40;
    if (f.lo() && !f.hi()) hi = lo + 40;
    std::vector<Real> xs;
    for (int i = 1; i <= n; ++i) xs.push_back(lo + (hi - lo) * i / (n + 1));
    return xs;
}
}  // namespace detail

inline GeneralizedDiagonal generalized_diagonal(const MeasureMatrix& w, int check_degree = 6) {
    Term base = detail::common_base(w);
    int n = w.dim();
    PolyMatrix f(n, n, Polynomial());
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (!w(i, j).is_zero()) f(i, j) = w(i, j).terms[0].factor;
    auto samples = detail::support_samples(base.base);
    GeneralizedDiagonal g;
    g.L = PolyMatrix(n, n, Polynomial());
    g.U = PolyMatrix(n, n, Polynomial());
    g.d.resize(n);
    // Doolittle over polynomials; every division must be exact
    for (int k = 0; k < n; ++k) {
        Polynomial dk = f(k, k);
        for (int m = 0; m < k; ++m) dk -= g.L(k, m) * g.d[m] * g.U(m, k);
        for (auto& x : samples)
            if (dk(x) == 0 || abs(dk(x)) <= tol() * std::max(Real(1), dk.max_abs()))
                throw SingularBlock("pointwise pivot " + std::to_string(k) + " vanishes on the support");
        g.d[k] = dk;
        g.L(k, k) = Polynomial(1);
        g.U(k, k) = Polynomial(1);
        for (int j = k + 1; j < n; ++j) {
            Polynomial up = f(k, j), lo = f(j, k);
            for (int m = 0; m < k; ++m) {
                up -= g.L(k, m) * g.d[m] * g.U(m, j);
                lo -= g.L(j, m) * g.d[m] * g.U(m, k);
            }
            g.U(k, j) = detail::exact_divide(up, dk, "pointwise elimination leaves a rational upper factor");
            g.L(j, k) = detail::exact_divide(lo, dk, "pointwise elimination leaves a rational lower factor");
        }
    }
    g.degree_condition = true;
    for (int k = 0; k < n; ++k) {
        DiffOperator lk, uk;
        lk.coef.assign(n, Polynomial());
        uk.coef.assign(n, Polynomial());
        for (int j = k; j < n; ++j) {
            lk.coef[j] = g.L(j, k);
            uk.coef[j] = g.U(k, j);
            if (j > k && !g.U(k, j).is_zero() && !(j - g.U(k, j).degree() > k)) g.degree_condition = false;
        }
        g.lower.push_back(lk);
        g.upper.push_back(uk);
        Measure m;
        m.terms.push_back({base.base, g.d[k], base.tilt});
        g.diagonal.push_back(m);
    }
    for (int a = 0; a <= check_degree; ++a)
        for (int c = 0; c <= check_degree; ++c) {
            Polynomial x = Polynomial::monomial(a), y = Polynomial::monomial(c);
            Real lhs = bilinear(x, y, w), rhs = 0;
            for (int k = 0; k < n; ++k) rhs += bilinear(g.lower[k](x), g.upper[k](y), MeasureMatrix::scalar(g.diagonal[k]));
            g.residual = std::max(g.residual, abs(lhs - rhs) / std::max({Real(1), abs(lhs), abs(rhs)}));
        }
    return g;
}

// (f, h) = <L f, L h>_μ with a lower-triangular invertible moment face:
// L g L^T = (L S^{-1}) H (L S^{-1})^T, so P = Δ S L^{-1} χ with Δ = diag(L).
struct LowerLink {
    SBPS formula, direct;
    Real agreement = 0;
    Matrix face;
};

inline LowerLink invertible_lower_link(const DiffOperator& op, const Measure& base, int k) {
    for (int s = 0; s <= op.order(); ++s)
        if (!op.coef[s].is_zero() && op.coef[s].degree() > s)
            throw NotInvertible("coefficient degree exceeds derivative order; face is not lower triangular");
    LowerLink out;
    out.face = moment_face(op, k, k);
    for (int i = 0; i < k; ++i)
        if (out.face(i, i) == 0) throw NotInvertible("moment face has a zero diagonal entry at " + std::to_string(i));
    Matrix g = standard_moment_matrix(base, k);
    SBPS cl = sbps(g);
    Matrix s(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j <= i; ++j) s(i, j) = cl.p1[i][j];
    Matrix linv = inverse(out.face);
    Matrix p = s * linv;
    for (int i = 0; i < k; ++i) {
        Real di = out.face(i, i);
        for (int j = 0; j < k; ++j) p(i, j) *= di;
    }
    out.formula.p1 = rows_as_polynomials(p);
    out.formula.p2 = out.formula.p1;
    for (int i = 0; i < k; ++i) out.formula.h.push_back(cl.h[i] * out.face(i, i) * out.face(i, i));
    auto w = opdo_measure_matrix(op, op, base, 0).w;
    out.direct = sbps(w, k);
    out.agreement = sbps_distance(out.formula, out.direct);
    return out;
}

}  // namespace sob
