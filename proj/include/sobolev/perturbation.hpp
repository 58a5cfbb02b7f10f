#pragma once

#include "sobolev.hpp"

namespace sob {

// ---- generic additive perturbation G -> G + g ----

struct AdditiveData {
    Matrix A;       // S1 g S2^T
    Matrix M1, M2;  // new = M_a * old
    Vector h;       // new norms
};

struct AdditiveResult {
    AdditiveData data;
    SBPS formula;  // quasi-determinant path
    SBPS direct;   // re-factorization path (empty when not requested)
    Real agreement = 0;
};

// New SBPS from the old one and A^{[k]}, via the three Θ* expressions.
inline AdditiveData additive_from_A(const SBPS& base, const Matrix& a, SBPS& out) {
    int k = a.rows();
    if (k > base.size()) throw ParameterOutOfRange("perturbation larger than the base sequence");
    Matrix ha = Matrix::diag(Vector(base.h.begin(), base.h.begin() + k)) + a;
    AdditiveData d;
    d.A = a;
    d.M1 = Matrix::identity(k);
    d.M2 = Matrix::identity(k);
    d.h.resize(k);
    out = SBPS{};
    for (int n = 0; n < k; ++n) {
        Polynomial p1 = base.p1[n], p2 = base.p2[n];
        Real hn = ha(n, n);
        if (n > 0) {
            Matrix lead = ha.lead(n);
            Matrix c1 = solve_right(lead, a.block(n, 0, 1, n));                        // A_{n,:n} (H+A)^{-1}
            Matrix c2 = solve_right(lead.transpose(), a.block(0, n, n, 1).transpose());  // A_{:n,n}^T (H+A)^{-T}
            for (int j = 0; j < n; ++j) {
                p1 -= base.p1[j] * c1(0, j);
                p2 -= base.p2[j] * c2(0, j);
                d.M1(n, j) = -c1(0, j);
                d.M2(n, j) = -c2(0, j);
                hn -= c1(0, j) * a(j, n);
            }
        }
        if (abs(hn) <= tol() * max_abs(ha.lead(n + 1))) throw NotFactorizable(n + 1);
        out.p1.push_back(p1);
        out.p2.push_back(p2);
        out.h.push_back(hn);
        d.h[n] = hn;
    }
    return d;
}

inline AdditiveResult additive_perturb(const Matrix& g0, const Matrix& g, bool with_direct = true) {
    int k = g0.rows();
    Factorization f = factorize(g0);
    SBPS base = sbps_from(g0, f);
    AdditiveResult r;
    Matrix a = f.S1 * g.lead(k) * f.S2.transpose();
    r.data = additive_from_A(base, a, r.formula);
    if (with_direct) {
        r.direct = sbps(g0 + g.lead(k));
        r.agreement = sbps_distance(r.formula, r.direct);
    }
    return r;
}

// ---- classical pair: diag(u_γ, λ u_{γ+1}) ----

struct ClassicalPairResult {
    SBPS sobolev, classical, shifted;  // SBPS of 𝒲, OPS of u_γ, OPS of u_{γ+1}
    Vector predicted;                  // h_{γ,k} + λ k² h_{γ+1,k-1}
    Real poly_distance = 0, norm_distance = 0;
};

inline ClassicalPairResult classical_pair(const PearsonFamily& fam, const Real& lambda, int k) {
    if (!fam.classical()) throw NotClassical("classical pair needs a classical family");
    if (lambda < 0) throw ParameterOutOfRange("lambda must be >= 0");
    Measure u = Measure::continuous(fam);
    Measure u1 = shifted_classical(fam, 1);
    ClassicalPairResult r;
    r.classical = sbps(MeasureMatrix::scalar(u), k);
    r.shifted = sbps(MeasureMatrix::scalar(u1), std::max(1, k - 1));
    MeasureMatrix w = MeasureMatrix::diagonal({u, lambda * u1});
    r.sobolev = sbps(w.trimmed(), k);
    r.predicted.resize(k);
    for (int n = 0; n < k; ++n) {
        r.predicted[n] = r.classical.h[n] + (n > 0 ? lambda * n * n * r.shifted.h[n - 1] : Real(0));
        r.poly_distance = std::max(r.poly_distance, Polynomial::rel_distance(r.sobolev.p1[n], r.classical.p1[n]));
        r.norm_distance = std::max(r.norm_distance, abs(r.sobolev.h[n] - r.predicted[n]) / abs(r.sobolev.h[n]));
    }
    return r;
}

// ---- coherent pairs (block size m; m = 1 is the standard notion) ----

// Q_{[k]} = R_{[k][k-1]} P'_{[k-1]} + R_{[k][k]} P'_{[k]}, blocks of size m, P' index shifted by one.
struct CoherencePair {
    Measure mu1, mu2;
    int m = 1;
    std::vector<Matrix> diag;  // R_{[k][k]}, k = 0, 1, ...
    std::vector<Matrix> sub;   // R_{[k][k-1]}, k = 1, 2, ... (sub[0] unused)

    // Q_k = P'_{k+1}/(k+1) - (r_k/k) P'_k with r given as r_1, r_2, ...
    static CoherencePair standard(const Measure& a, const Measure& b, const std::vector<Real>& r) {
        CoherencePair cp{a, b, 1, {}, {}};
        cp.diag.push_back(Matrix(1, 1, Real(1)));
        cp.sub.push_back(Matrix(1, 1));
        for (std::size_t k = 1; k <= r.size(); ++k) {
            cp.diag.push_back(Matrix(1, 1, Real(1) / (k + 1)));
            cp.sub.push_back(Matrix(1, 1, -r[k - 1] / Real(k)));
        }
        return cp;
    }

    int blocks() const { return static_cast<int>(diag.size()); }
    int capacity() const { return blocks() * m; }
};

// R^{[n]} assembled from blocks
inline Matrix coherence_matrix(const CoherencePair& cp, int n) {
    if (n > cp.capacity()) throw ParameterOutOfRange("not enough coherence blocks for this truncation");
    int nb = (n + cp.m - 1) / cp.m;
    Matrix r(nb * cp.m, nb * cp.m);
    for (int b = 0; b < nb; ++b) {
        r.set_block(b * cp.m, b * cp.m, cp.diag[b]);
        if (b > 0) r.set_block(b * cp.m, (b - 1) * cp.m, cp.sub[b]);
    }
    return r.lead(n);
}

// R^{-1} = N (I + r + r² + ...), r nilpotent on each truncation
inline Matrix coherence_inverse(const CoherencePair& cp, int n) {
    int nb = (n + cp.m - 1) / cp.m, sz = nb * cp.m;
    if (sz > cp.capacity()) throw ParameterOutOfRange("not enough coherence blocks for this truncation");
    Matrix nm(sz, sz), rm(sz, sz);
    std::vector<Matrix> dinv;
    for (int b = 0; b < nb; ++b) dinv.push_back(inverse(cp.diag[b]));
    for (int b = 0; b < nb; ++b) {
        nm.set_block(b * cp.m, b * cp.m, dinv[b]);
        if (b > 0) rm.set_block(b * cp.m, (b - 1) * cp.m, Real(-1) * cp.sub[b] * dinv[b - 1]);
    }
    Matrix s = Matrix::identity(sz), p = Matrix::identity(sz);
    for (int i = 1; i < nb; ++i) {
        p = p * rm;
        s += p;
    }
    return (nm * s).lead(n);
}

inline void validate_coherence_shape(const CoherencePair& cp) {
    if (cp.m < 1) throw CoherenceViolation("block size must be >= 1");
    for (int b = 0; b < cp.blocks(); ++b) {
        const Matrix& d = cp.diag[b];
        if (d.rows() != cp.m || d.cols() != cp.m) throw CoherenceViolation("diagonal block has the wrong shape");
        for (int i = 0; i < cp.m; ++i) {
            if (!close(d(i, i), Real(1) / (b * cp.m + i + 1), tol())) throw CoherenceViolation("diagonal block has the wrong diagonal");
            for (int j = i + 1; j < cp.m; ++j)
                if (d(i, j) != 0) throw CoherenceViolation("diagonal block is not lower triangular");
        }
        if (b > 0) {
            if (cp.sub[b].rows() != cp.m || cp.sub[b].cols() != cp.m) throw CoherenceViolation("sub-diagonal block has the wrong shape");
            if (cp.m == 1 && cp.sub[b](0, 0) == 0) throw CoherenceViolation("coherence parameters must be nonzero");
        }
    }
}

// Checks Q = R P'(shifted) for the first `count` polynomials; returns the max relative residual.
inline Real coherence_residual(const CoherencePair& cp, int count) {
    validate_coherence_shape(cp);
    SBPS p = sbps(MeasureMatrix::scalar(cp.mu1), count + 1);
    SBPS q = sbps(MeasureMatrix::scalar(cp.mu2), count);
    Matrix r = coherence_matrix(cp, count);
    Real worst = 0;
    for (int i = 0; i < count; ++i) {
        Polynomial s;
        for (int j = 0; j <= i; ++j)
            if (r(i, j) != 0) s += p.p1[j + 1].derivative() * r(i, j);
        worst = std::max(worst, Polynomial::rel_distance(s, q.p1[i]));
    }
    if (worst > check_tol()) throw CoherenceViolation("coherence relation fails (residual " + worst.str(6) + ")");
    return worst;
}

struct CoherentResult {
    SBPS formula, direct;
    Matrix B;  // R^{-1} K R^{-T}
    Real agreement = 0;
    Real coherence = 0;
};

inline CoherentResult coherent_pair_sbps(const CoherencePair& cp, const Real& lambda, int k) {
    if (!(lambda > 0)) throw ParameterOutOfRange("lambda must be > 0");
    CoherentResult r;
    r.coherence = coherence_residual(cp, std::max(1, k - 1));
    SBPS p = sbps(MeasureMatrix::scalar(cp.mu1), k);
    int n = std::max(1, k - 1);
    SBPS q = sbps(MeasureMatrix::scalar(cp.mu2), n);
    Matrix rinv = coherence_inverse(cp, n);
    if (rel_diff(rinv, inverse(coherence_matrix(cp, n))) > check_tol())
        throw CheckFailed("series inverse of the coherence matrix disagrees with direct inversion");
    r.B = rinv * Matrix::diag(q.h) * rinv.transpose();
    Matrix a(k, k);
    if (k > 1) a.set_block(1, 1, lambda * r.B.lead(k - 1));
    additive_from_A(p, a, r.formula);
    r.direct = sbps(MeasureMatrix::diagonal({cp.mu1, lambda * cp.mu2}), k);
    r.agreement = sbps_distance(r.formula, r.direct);
    return r;
}

inline CoherentResult block_coherent_sbps(const CoherencePair& cp, const Real& lambda, int k) {
    return coherent_pair_sbps(cp, lambda, k);
}

// ---- discrete Sobolev part ----

struct DiscreteSpec {
    struct Node {
        Real x;
        int n = 1, m = 1;  // derivative counts in the first / second slot
    };
    std::vector<Node> nodes;
    std::vector<Matrix> xi;  // n_i × m_i mass blocks

    int total_n() const {
        int s = 0;
        for (auto& v : nodes) s += v.n;
        return s;
    }
    int total_m() const {
        int s = 0;
        for (auto& v : nodes) s += v.m;
        return s;
    }
    void validate() const {
        if (xi.size() != nodes.size()) throw ParameterOutOfRange("one mass block per node required");
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            if (nodes[i].n < 1 || nodes[i].m < 1) throw ParameterOutOfRange("node multiplicities must be >= 1");
            if (xi[i].rows() != nodes[i].n || xi[i].cols() != nodes[i].m) throw ParameterOutOfRange("mass block shape mismatch");
            for (std::size_t j = 0; j < i; ++j)
                if (nodes[i].x == nodes[j].x) throw ParameterOutOfRange("nodes must be distinct");
        }
    }
    Matrix Xi() const {
        Matrix x(total_n(), total_m());
        int r = 0, c = 0;
        for (std::size_t i = 0; i < nodes.size(); ++i) {
            x.set_block(r, c, xi[i]);
            r += nodes[i].n;
            c += nodes[i].m;
        }
        return x;
    }
    // W(x) = Π (x - x_i)^{max(n_i, m_i)}
    Polynomial W() const {
        std::vector<std::pair<Real, int>> roots;
        for (auto& v : nodes) roots.push_back({v.x, std::max(v.n, v.m)});
        return Polynomial::from_roots(roots);
    }
    // the same data as atoms of a measure matrix: ξ_{a,b} at entry (a, b)
    MeasureMatrix as_measure_matrix() const {
        int ord = 0;
        for (auto& v : nodes) ord = std::max({ord, v.n - 1, v.m - 1});
        MeasureMatrix w(ord);
        for (std::size_t i = 0; i < nodes.size(); ++i)
            for (int a = 0; a < nodes[i].n; ++a)
                for (int b = 0; b < nodes[i].m; ++b) w(a, b) += Measure::point(nodes[i].x, xi[i](a, b));
        return w;
    }
};

// N[f] (first-slot derivative data) or M[f] (second-slot)
inline Vector node_data(const DiscreteSpec& s, const Polynomial& f, bool first_slot) {
    Vector v;
    for (auto& nd : s.nodes) {
        int cnt = first_slot ? nd.n : nd.m;
        for (int t = 0; t < cnt; ++t) v.push_back(f.derivative(t)(nd.x));
    }
    return v;
}

// rows: polynomials, columns: node data
inline Matrix node_matrix(const DiscreteSpec& s, const std::vector<Polynomial>& ps, bool first_slot, int count) {
    int cols = first_slot ? s.total_n() : s.total_m();
    Matrix m(count, cols);
    for (int i = 0; i < count; ++i) {
        Vector v = node_data(s, ps[i], first_slot);
        for (int j = 0; j < cols; ++j) m(i, j) = v[j];
    }
    return m;
}

inline std::vector<Polynomial> monomials(int k) {
    std::vector<Polynomial> c;
    for (int i = 0; i < k; ++i) c.push_back(Polynomial::monomial(i));
    return c;
}

// g = N[χ] Ξ M[χ]^T
inline Matrix discrete_moment_perturbation(const DiscreteSpec& s, int k) {
    s.validate();
    auto chi = monomials(k);
    return node_matrix(s, chi, true, k) * s.Xi() * node_matrix(s, chi, false, k).transpose();
}

// 𝕂^{[k]} = M[P2^{[k]}]^T H^{-1} N[P1^{[k]}]
inline Matrix cd_matrix(const SBPS& base, const DiscreteSpec& s, int k) {
    Matrix mp2 = node_matrix(s, base.p2, false, k), np1 = node_matrix(s, base.p1, true, k);
    Vector hinv(k);
    for (int i = 0; i < k; ++i) hinv[i] = 1 / base.h[i];
    return mp2.transpose() * Matrix::diag(hinv) * np1;
}

struct DiscreteResult {
    SBPS expanded;  // connection-row form
    SBPS bordered;  // Θ* form with kernel sections
    SBPS direct;    // re-factorization of G + g
    Matrix M1, M2;  // connection matrices, new = M * old
    Real agreement = 0;
};

inline DiscreteResult discrete_sobolev(const MeasureMatrix& w, const DiscreteSpec& s, int k) {
    s.validate();
    Matrix g0 = assemble_moment_matrix(w, k);
    SBPS base = sbps(g0);
    Matrix xi = s.Xi();
    DiscreteResult r;
    r.M1 = Matrix::identity(k);
    r.M2 = Matrix::identity(k);
    int tn = s.total_n(), tm = s.total_m();
    auto guarded = [](auto&& fn) {
        try {
            return fn();
        } catch (const SingularBlock&) {
            throw SeriesDivergence("I + K Xi is singular: no biorthogonal sequence");
        }
    };
    for (int n = 0; n < k; ++n) {
        Matrix kk = cd_matrix(base, s, n);
        Matrix np1 = node_matrix(s, base.p1, true, n), mp2 = node_matrix(s, base.p2, false, n);
        Matrix nk = Matrix::row(node_data(s, base.p1[n], true));   // N[P1_n]
        Matrix mk = Matrix::row(node_data(s, base.p2[n], false));  // M[P2_n]
        Vector hinv(n);
        for (int i = 0; i < n; ++i) hinv[i] = 1 / base.h[i];
        Matrix hi = Matrix::diag(hinv);

        Matrix c1 = guarded([&] { return solve_right(Matrix::identity(tm) + kk * xi, nk * xi); });  // NΞ(I+𝕂Ξ)^{-1}
        Matrix row1 = Real(-1) * c1 * mp2.transpose() * hi;                                        // 1 × n
        Matrix c2 = guarded([&] { return solve(Matrix::identity(tn) + xi * kk, xi * mk.transpose()); });
        Matrix col2 = Real(-1) * hi * np1 * c2;  // n × 1

        Polynomial e1 = base.p1[n], e2 = base.p2[n];
        for (int j = 0; j < n; ++j) {
            e1 += base.p1[j] * row1(0, j);
            e2 += base.p2[j] * col2(j, 0);
            r.M1(n, j) = row1(0, j);
            r.M2(n, j) = col2(j, 0);
        }
        // h̆_n = h_n + N[P̆1_n] Ξ M[P2_n]^T
        Real hn = base.h[n] + (Matrix::row(node_data(s, e1, true)) * xi * mk.transpose())(0, 0);
        r.expanded.p1.push_back(e1);
        r.expanded.p2.push_back(e2);
        r.expanded.h.push_back(hn);

        // bordered form: [[I+𝕂Ξ, M[K(·,x)]^T], [N[P1_n]Ξ, P1_n(x)]]
        std::vector<Polynomial> ksec1(tm, Polynomial()), ksec2(tn, Polynomial());
        {
            int c = 0;
            for (auto& nd : s.nodes)
                for (int t = 0; t < nd.m; ++t, ++c)
                    for (int l = 0; l < n; ++l) ksec1[c] += base.p1[l] * (base.p2[l].derivative(t)(nd.x) * hinv[l]);
            c = 0;
            for (auto& nd : s.nodes)
                for (int t = 0; t < nd.n; ++t, ++c)
                    for (int l = 0; l < n; ++l) ksec2[c] += base.p2[l] * (base.p1[l].derivative(t)(nd.x) * hinv[l]);
        }
        Polynomial b1 = guarded([&] {
            return tm == 0 ? base.p1[n] : theta_star(Matrix::identity(tm) + kk * xi, ksec1, (nk * xi).row_vec(0), base.p1[n]);
        });
        Polynomial b2 = guarded([&] {
            // [[I+Ξ𝕂, ΞM[P2_n]^T], [N[K(x,·)], P2_n]]: c A^{-1} b with c polynomial, so transpose the roles
            if (tn == 0) return base.p2[n];
            Matrix v = solve(Matrix::identity(tn) + xi * kk, xi * mk.transpose());
            Polynomial out = base.p2[n];
            for (int j = 0; j < tn; ++j) out -= ksec2[j] * v(j, 0);
            return out;
        });
        r.bordered.p1.push_back(b1);
        r.bordered.p2.push_back(b2);
        r.bordered.h.push_back(hn);
    }
    r.direct = sbps(g0 + discrete_moment_perturbation(s, k));
    r.agreement = std::max(sbps_distance(r.expanded, r.direct), sbps_distance(r.bordered, r.direct));
    return r;
}

// ---- W(x) recurrence for a standard inner product with discrete Sobolev part ----

struct WRecurrence {
    Polynomial W;
    Matrix J, R1, R2;
    Vector h;      // perturbed norms
    int interior;  // rows/cols unaffected by truncation
    BandProfile band1, band2;
    Real duality = 0;  // |R1 - H̆ R2^T H̆^{-1}| on the interior block, relative
};

inline WRecurrence w_recurrence(const Measure& base, const DiscreteSpec& s, int k) {
    MeasureMatrix w = MeasureMatrix::scalar(base);
    DiscreteResult d = discrete_sobolev(w, s, k);
    Factorization f = factorize(assemble_moment_matrix(w, k + 1));
    WRecurrence r;
    r.W = s.W();
    Matrix sfull = f.S1;
    r.J = (sfull * shift_matrix(k + 1) * unit_lower_inverse(sfull)).lead(k);
    Matrix wj = poly_of(r.W, r.J);
    r.R1 = d.M1 * wj * unit_lower_inverse(d.M1);
    r.R2 = d.M2 * wj * unit_lower_inverse(d.M2);
    r.h = d.direct.h;
    r.interior = std::max(0, k - std::max(0, r.W.degree()));
    int n = r.interior;
    r.band1 = band_of(r.R1.lead(n), check_tol());
    r.band2 = band_of(r.R2.lead(n), check_tol());
    Vector hinv(n);
    for (int i = 0; i < n; ++i) hinv[i] = 1 / r.h[i];
    Vector hh(r.h.begin(), r.h.begin() + n);
    Matrix dual = Matrix::diag(hh) * r.R2.lead(n).transpose() * Matrix::diag(hinv);
    r.duality = rel_diff(r.R1.lead(n), dual);
    return r;
}

}  // namespace sob
