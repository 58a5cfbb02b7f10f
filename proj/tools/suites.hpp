#pragma once

// Named invariant suites shared by `verify` and the acceptance binary.
// Oracles here are written against closed forms or independent re-computation,
// never against the code path they check.

#include "sobolev/equivalence.hpp"
#include "sobolev/operator.hpp"
#include "sobolev/perturbation.hpp"
#include "sobolev/spectral.hpp"
#include "sobolev/toda.hpp"

#include <functional>
#include <random>
#include <sstream>

namespace sob::suites {

struct Check {
    std::string label;
    bool ok = false;
    std::string detail;
};

struct Report {
    std::string name;
    std::vector<Check> checks;
    bool passed() const {
        if (checks.empty()) return false;
        for (auto& c : checks)
            if (!c.ok) return false;
        return true;
    }
    // value <= bound
    void le(const std::string& label, const Real& value, const Real& bound) {
        checks.push_back({label, value <= bound, to_string(value, 3) + " <= " + to_string(bound, 3)});
    }
    void in(const std::string& label, const Real& value, double lo, double hi) {
        checks.push_back({label, value >= lo && value <= hi,
                          to_string(value, 4) + " in [" + to_string(Real(lo), 2) + ", " + to_string(Real(hi), 2) + "]"});
    }
    void that(const std::string& label, bool ok, const std::string& detail = "") { checks.push_back({label, ok, detail}); }
    // runs fn, turning a thrown error into a failed check
    void guard(const std::string& label, const std::function<void()>& fn) {
        try {
            fn();
        } catch (const std::exception& e) {
            checks.push_back({label, false, std::string("error: ") + e.what()});
        }
    }
    std::string text() const {
        std::ostringstream o;
        for (auto& c : checks) o << (c.ok ? "  [PASS] " : "  [FAIL] ") << c.label << (c.detail.empty() ? "" : ": " + c.detail) << "\n";
        o << "suite " << name << ": " << (passed() ? "PASS" : "FAIL") << "\n";
        return o.str();
    }
};

// ---- shared fixtures and oracles ----

namespace fx {

inline Real q(long p, long d = 1) { return Real(p) / Real(d); }

inline Measure legendre() { return Measure::continuous(PearsonFamily::jacobi(0, 0)); }
inline Measure unit_uniform() { return Measure::continuous(PearsonFamily::uniform(0, 1)); }

// nonsymmetric Sobolev on [0,1] with an off-diagonal atom
inline MeasureMatrix sobolev_unit() {
    MeasureMatrix w(1);
    w(0, 0) = unit_uniform();
    w(0, 1) = Measure::point(q(1, 2), q(1, 3));
    w(1, 1) = Measure::continuous(PearsonFamily::uniform(0, 1), Polynomial{Real(1), Real(1)});
    return w;
}

// Hermite-based 2×2 fixture, used where an unbounded support matters
inline MeasureMatrix sobolev_hermite() {
    Measure h = Measure::continuous(PearsonFamily::hermite());
    MeasureMatrix w(1);
    w(0, 0) = h;
    w(0, 1) = Polynomial{q(1, 4)} * h;
    w(1, 1) = Polynomial{Real(1), Real(0), q(1, 2)} * h;
    return w;
}

// Random mixed fixtures: 𝒩 ∈ {1, 2}, diagonal-dominant, atoms on and off the diagonal.
inline std::vector<MeasureMatrix> random_mixed(int count, unsigned seed = 20240607) {
    std::mt19937 rng(seed);
    auto pick = [&](int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); };
    std::vector<PearsonFamily> bases{PearsonFamily::uniform(-1, 2), PearsonFamily::jacobi(0, 0),
                                     PearsonFamily::jacobi(q(1, 2), q(-1, 2)), PearsonFamily::laguerre(0),
                                     PearsonFamily::hermite()};
    std::vector<MeasureMatrix> out;
    for (int f = 0; f < count; ++f) {
        int n = 1 + f % 2;
        PearsonFamily b = bases[f % bases.size()];
        auto [lo, hi] = std::pair<Real, Real>{b.lo() ? *b.lo() : Real(-2), b.hi() ? *b.hi() : Real(2)};
        MeasureMatrix w(n);
        for (int i = 0; i <= n; ++i) {
            w(i, i) = Measure::continuous(b, Polynomial{q(pick(2, 6), 2)});
            if (pick(0, 1)) w(i, i) += Measure::point(lo + (hi - lo) * q(pick(1, 9), 10), q(pick(1, 4), 4));
        }
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j <= n; ++j) {
                if (i == j) continue;
                if (pick(0, 2) > 0) w(i, j) = Measure::continuous(b, Polynomial{q(pick(-3, 3), 20), q(pick(-3, 3), 40)});
                if (pick(0, 2) == 0) w(i, j) += Measure::point(lo + (hi - lo) * q(pick(1, 9), 10), q(pick(-2, 2), 10));
            }
        out.push_back(w.trimmed());
    }
    return out;
}

// monic three-term recurrences
inline std::vector<Polynomial> recurrence(const PearsonFamily& f, int count) {
    using K = PearsonFamily::Kind;
    std::vector<Polynomial> p{Polynomial(1)};
    Real a = f.alpha, b = f.beta;
    for (int n = 0; p.size() < std::size_t(count); ++n) {
        Real alpha_n, beta_n = 0;
        if (f.kind == K::Hermite) {
            alpha_n = 0;
            beta_n = Real(n) / 2;
        } else if (f.kind == K::Laguerre) {
            alpha_n = 2 * n + 1 + a;
            beta_n = n * (n + a);
        } else {
            // Jacobi on (1-x)^a (1+x)^b
            Real s = 2 * n + a + b;
            alpha_n = (n == 0) ? (b - a) / (a + b + 2) : (b * b - a * a) / (s * (s + 2));
            if (n > 0) {
                Real num = 4 * n * (n + a) * (n + b) * (n + a + b);
                beta_n = (n == 1 && a + b == -1) ? Real(0) : num / (s * s * (s + 1) * (s - 1));
            }
        }
        Polynomial next = Polynomial{-alpha_n, Real(1)} * p[n];
        if (n > 0) next -= p[n - 1] * beta_n;
        p.push_back(next);
    }
    return p;
}

// monic squared norms of the base weights (Hermite e^{-x²}, Laguerre x^α e^{-x}, Jacobi (1-x)^α(1+x)^β)
inline Real classical_norm(const PearsonFamily& f, int n) {
    using boost::multiprecision::tgamma;
    using K = PearsonFamily::Kind;
    Real fact = tgamma(Real(n + 1));
    if (f.kind == K::Hermite) return sqrt(boost::math::constants::pi<Real>()) * fact / pow(Real(2), n);
    if (f.kind == K::Laguerre) return fact * tgamma(n + f.alpha + 1);
    Real a = f.alpha, b = f.beta, s = 2 * n + a + b;
    return pow(Real(2), s + 1) * fact * tgamma(n + a + 1) * tgamma(n + b + 1) * tgamma(n + a + b + 1) /
           ((s + 1) * tgamma(s + 1) * tgamma(s + 1));
}

inline std::string family_name(const PearsonFamily& f) {
    using K = PearsonFamily::Kind;
    switch (f.kind) {
        case K::Hermite: return "hermite";
        case K::Laguerre: return "laguerre(" + to_string(f.alpha, 2) + ")";
        case K::Jacobi: return "jacobi(" + to_string(f.alpha, 2) + "," + to_string(f.beta, 2) + ")";
        default: return "uniform";
    }
}

inline std::vector<PearsonFamily> classical_families() {
    return {PearsonFamily::hermite(), PearsonFamily::laguerre(0), PearsonFamily::laguerre(q(1, 2)),
            PearsonFamily::jacobi(0, 0)};
}

}  // namespace fx

// ---- 1. classical oracle ----

inline Report classical() {
    Report r{"classical", {}};
    Real bound = pow2(-150);
    for (auto& f : fx::classical_families())
        r.guard(fx::family_name(f), [&] {
            SBPS s = sbps(MeasureMatrix::scalar(Measure::continuous(f)), 21);
            auto p = fx::recurrence(f, 21);
            Real d = 0, dn = 0;
            for (int n = 0; n <= 20; ++n) {
                d = std::max({d, Polynomial::rel_distance(s.p1[n], p[n]), Polynomial::rel_distance(s.p2[n], p[n])});
                dn = std::max(dn, abs(s.h[n] - fx::classical_norm(f, n)) / fx::classical_norm(f, n));
            }
            r.le(fx::family_name(f) + " coefficients k<=20", d, bound);
            r.le(fx::family_name(f) + " norms k<=20", dn, bound);
        });
    return r;
}

// ---- 2. classical pair diag(u, λ p2 u) ----

inline Real shifted_norm(const PearsonFamily& f, int n) {
    using K = PearsonFamily::Kind;
    if (f.kind == K::Laguerre) return fx::classical_norm(PearsonFamily::laguerre(f.alpha + 1), n);
    if (f.kind == K::Jacobi) return fx::classical_norm(PearsonFamily::jacobi(f.alpha + 1, f.beta + 1), n);
    return fx::classical_norm(f, n);
}

inline Report classical_pair_suite() {
    Report r{"classical_pair", {}};
    Real bound = pow2(-150);
    for (auto& f : fx::classical_families())
        for (Real lambda : {fx::q(1, 4), Real(1), Real(4)}) {
            std::string tag = fx::family_name(f) + " lambda=" + to_string(lambda, 2);
            r.guard(tag, [&] {
                MeasureMatrix w = MeasureMatrix::diagonal({Measure::continuous(f), shifted_classical(f, 1, lambda)});
                SBPS s = sbps(w, 11);
                auto p = fx::recurrence(f, 11);
                Real dp = 0, dh = 0;
                for (int k = 0; k <= 10; ++k) {
                    dp = std::max({dp, Polynomial::rel_distance(s.p1[k], p[k]), Polynomial::rel_distance(s.p2[k], p[k])});
                    Real want = fx::classical_norm(f, k) + (k > 0 ? lambda * k * k * shifted_norm(f, k - 1) : Real(0));
                    dh = std::max(dh, abs(s.h[k] - want) / abs(s.h[k]));
                }
                r.le(tag + " polynomials", dp, bound);
                r.le(tag + " norms", dh, bound);
            });
        }
    return r;
}

// ---- 3. biorthogonality ----

inline void biorthogonality_on(Report& r, const std::string& tag, const MeasureMatrix& w, int k) {
    r.guard(tag, [&] {
        SBPS s = sbps(w, k);
        Real worst = 0;
        for (int a = 0; a < k; ++a)
            for (int b = 0; b < k; ++b) {
                Real v = bilinear(s.p1[a], s.p2[b], w) - (a == b ? s.h[a] : Real(0));
                worst = std::max(worst, abs(v) / std::max(Real(1), abs(s.h[a])));
            }
        r.le(tag + " |(P1_r,P2_k) - h_r d_rk| r,k<" + std::to_string(k), worst, pow2(-150));
    });
}

inline Report biorthogonality(const std::vector<std::pair<std::string, MeasureMatrix>>& extra = {}) {
    Report r{"biorthogonality", {}};
    auto ws = fx::random_mixed(5);
    for (std::size_t i = 0; i < ws.size(); ++i)
        biorthogonality_on(r, "mixed#" + std::to_string(i) + " N=" + std::to_string(ws[i].order()), ws[i], 12);
    for (auto& [name, w] : extra) biorthogonality_on(r, name, w, 12);
    return r;
}

// ---- 4. dual-path transforms ----

inline GermSet christoffel_roots() { return GermSet{{{Real(2), 2}, {Real(-3), 1}}}; }

inline GeronimusSpec geronimus_with_masses() {
    Matrix m2(2, 2);
    m2(0, 0) = 1;
    m2(0, 1) = fx::q(1, 2);
    m2(1, 0) = fx::q(-1, 3);
    m2(1, 1) = 2;
    return GeronimusSpec{GermSet{{{Real(-1), 2}, {Real(3), 1}}}, {m2, Matrix::diag({Real(2)})}};
}

inline GeronimusSpec geronimus_plain() { return GeronimusSpec{GermSet{{{Real(-1), 2}, {Real(3), 1}}}, {}}; }

inline Report transforms() {
    Report r{"transforms", {}};
    Real bound = pow2(-120);
    int k = 10;
    MeasureMatrix w = fx::sobolev_unit(), leg = MeasureMatrix::scalar(fx::legendre());
    GermSet roots = christoffel_roots();
    auto agree = [&](const std::string& tag, const std::function<Transformed()>& fn) {
        r.guard(tag, [&] { r.le(tag + " formula vs re-factorization", fn().agreement, bound); });
    };
    agree("christoffel left legendre", [&] { return christoffel(leg, roots, Side::Left, k); });
    agree("christoffel left sobolev", [&] { return christoffel(w, roots, Side::Left, k); });
    agree("christoffel right sobolev", [&] { return christoffel(w, roots, Side::Right, k); });
    agree("christoffel left hermite-sobolev",
          [&] { return christoffel(fx::sobolev_hermite(), GermSet{{{fx::q(3, 2), 1}, {Real(-1), 1}}}, Side::Left, k); });
    agree("geronimus right plain", [&] { return geronimus(w, geronimus_plain(), Side::Right, k); });
    agree("geronimus left plain", [&] { return geronimus(w, geronimus_plain(), Side::Left, k); });
    agree("geronimus right masses", [&] { return geronimus(w, geronimus_with_masses(), Side::Right, k); });
    agree("geronimus left masses", [&] { return geronimus(w, geronimus_with_masses(), Side::Left, k); });
    agree("spectral RL", [&] { return spectral(w, roots, geronimus_with_masses(), Orientation::RL, k); });
    agree("spectral LR", [&] { return spectral(w, roots, geronimus_with_masses(), Orientation::LR, k); });
    agree("spectral RL plain", [&] { return spectral(w, roots, geronimus_plain(), Orientation::RL, k); });
    for (Side side : {Side::Right, Side::Left}) {
        std::string tag = side == Side::Right ? "right" : "left";
        r.guard("round trip " + tag, [&] {
            GeronimusSpec g = geronimus_plain();
            Transformed ge = geronimus(w, g, side, k + g.degree());
            Side back = side;  // Christoffel by Q on the same slot undoes the division
            SBPS undone = christoffel_formula(ge.direct, g.germ, back, k);
            r.le("geronimus(xi=0) then christoffel " + tag + " is the identity", sbps_distance(undone, truncated(ge.base, k)), bound);
        });
    }
    return r;
}

// ---- 5. discrete Sobolev ----

inline Report discrete() {
    Report r{"discrete", {}};
    Real bound = pow2(-120);
    int k = 10;
    auto run = [&](const std::string& tag, const Measure& base, const DiscreteSpec& s) {
        r.guard(tag, [&] {
            DiscreteResult d = discrete_sobolev(MeasureMatrix::scalar(base), s, k);
            r.le(tag + " connection form vs re-factorization", sbps_distance(d.expanded, d.direct), bound);
            r.le(tag + " bordered form vs re-factorization", sbps_distance(d.bordered, d.direct), bound);
        });
    };
    Measure lag = Measure::continuous(PearsonFamily::laguerre(0)), her = Measure::continuous(PearsonFamily::hermite());
    DiscreteSpec one{{{Real(0), 1, 1}}, {Matrix::diag({Real(1)})}};
    run("laguerre(0) + delta_0", lag, one);
    Matrix xi2(2, 2);
    xi2(0, 0) = 1;
    xi2(0, 1) = fx::q(1, 2);
    xi2(1, 0) = fx::q(1, 2);
    xi2(1, 1) = 2;
    run("laguerre(0) + sobolev node at 0", lag, DiscreteSpec{{{Real(0), 2, 2}}, {xi2}});
    Matrix xi21(2, 1);
    xi21(0, 0) = fx::q(3, 4);
    xi21(1, 0) = fx::q(-1, 4);
    run("hermite + two nodes", her,
        DiscreteSpec{{{fx::q(1, 2), 2, 1}, {Real(-1), 1, 1}}, {xi21, Matrix::diag({fx::q(1, 3)})}});
    r.guard("laguerre(0) + delta_0 P1", [&] {
        DiscreteResult d = discrete_sobolev(MeasureMatrix::scalar(lag), one, 3);
        r.le("laguerre(0) + delta_0 gives P1 = x - 1/2", Polynomial::rel_distance(d.direct.p1[1], Polynomial{fx::q(-1, 2), Real(1)}),
             bound);
        r.le("laguerre(0) + delta_0 formula P1 = x - 1/2",
             Polynomial::rel_distance(d.expanded.p1[1], Polynomial{fx::q(-1, 2), Real(1)}), bound);
    });
    return r;
}

// ---- 6. the counterexample class with 𝒳W = W𝒳^T ----

inline MeasureMatrix wx_fixture() {
    MeasureMatrix w(1);
    w(0, 0) = fx::legendre();
    Measure w1 = Measure::continuous(PearsonFamily::jacobi(0, 0), Polynomial{fx::q(1, 4), Real(0), fx::q(-1, 4)});
    w(0, 1) = w1;
    w(1, 0) = w1;
    return w;
}

inline Report wx() {
    Report r{"wx", {}};
    Real tight = pow2(-150), loose = pow2(-120);
    MeasureMatrix w = wx_fixture();
    r.guard("hankel", [&] {
        Matrix g = assemble_moment_matrix(w, 11);
        Real scale = std::max(Real(1), max_abs(g)), defect = 0;
        for (int i = 0; i + 1 < 11; ++i)
            for (int j = 0; j + 1 < 11; ++j) defect = std::max(defect, abs(g(i, j + 1) - g(i + 1, j)) / scale);
        r.le("G^[10] Hankel defect", defect, tight);
    });
    r.guard("recurrence", [&] {
        Factorization f = factorize(assemble_moment_matrix(w, 12));
        Matrix j = f.S1 * shift_matrix(12) * unit_lower_inverse(f.S1);
        int n = 10;
        Real off = 0, sub = 0;
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b)
                if (std::abs(a - b) > 1) off = std::max(off, abs(j(a, b)));
        for (int a = 1; a < n; ++a) sub = std::max(sub, abs(j(a, a - 1) - f.h[a] / f.h[a - 1]) / abs(f.h[a] / f.h[a - 1]));
        r.le("J tridiagonal (max entry off the band)", off, tight);
        r.le("J_{n,n-1} = h_n/h_{n-1}", sub, tight);
        SBPS s = sbps(assemble_moment_matrix(w, 10));
        Real sym = 0;
        for (int a = 0; a < 10; ++a) sym = std::max(sym, Polynomial::rel_distance(s.p1[a], s.p2[a]));
        r.le("P1 = P2", sym, tight);
    });
    r.guard("equivalent scalar", [&] {
        DiagonalReduction red = reduce_to_diagonal(w);
        MeasureMatrix scalar = (red.diagonal + red.discrete).trimmed();
        r.that("reduction yields a scalar measure", scalar.order() == 0, "order " + std::to_string(scalar.order()));
        r.le("G equals G of the reduced scalar measure", moment_mismatch(w, scalar, 10), loose);
        // independent: density 1 - d/dx (1-x²)/4 = 1 + x/2 against Legendre, closed-form moments
        Matrix g = assemble_moment_matrix(w, 10);
        Real worst = 0;
        for (int a = 0; a < 10; ++a)
            for (int b = 0; b < 10; ++b) {
                int m = a + b;
                Real even = (m % 2 == 0) ? Real(2) / (m + 1) : Real(0);
                Real odd = (m % 2 == 1) ? Real(1) / (m + 2) : Real(0);  // ∫ x^{m+1}/2
                worst = std::max(worst, abs(g(a, b) - even - odd));
            }
        r.le("G equals moments of (1 + x/2)dx on [-1,1]", worst, tight);
    });
    return r;
}

// ---- 7. elementary moves ----

inline std::vector<std::pair<std::string, MeasureMatrix>> move_fixtures() {
    std::vector<std::pair<std::string, MeasureMatrix>> out;
    MeasureMatrix a(1);
    a(0, 0) = fx::legendre();
    a(0, 1) = Measure::continuous(PearsonFamily::jacobi(0, 0), Polynomial{Real(1), Real(0), Real(-1)});
    a(1, 0) = a(0, 1);
    out.push_back({"(1, 1-x^2) on [-1,1]", a});
    MeasureMatrix b(1);
    b(0, 0) = fx::unit_uniform();
    b(0, 1) = Measure::continuous(PearsonFamily::uniform(0, 1), Polynomial{Real(1), Real(2)});
    b(1, 0) = Measure::continuous(PearsonFamily::uniform(0, 1), Polynomial{fx::q(1, 3)}) + Measure::point(fx::q(1, 2), Real(1));
    b(1, 1) = Measure::continuous(PearsonFamily::uniform(0, 1), Polynomial{Real(1), Real(0), Real(1)});
    out.push_back({"nonsymmetric uniform [0,1]", b});
    MeasureMatrix c(1);
    c(0, 0) = Measure::continuous(PearsonFamily::hermite());
    c(1, 0) = Measure::continuous(PearsonFamily::hermite(), Polynomial{fx::q(1, 2), Real(1)});
    c(1, 1) = Measure::continuous(PearsonFamily::hermite(), Polynomial{Real(2)});
    out.push_back({"hermite", c});
    MeasureMatrix d(2);
    d(0, 0) = Measure::continuous(PearsonFamily::jacobi(1, 1));
    d(1, 1) = Measure::continuous(PearsonFamily::jacobi(1, 1), Polynomial{Real(2)});
    d(2, 1) = Measure::continuous(PearsonFamily::jacobi(2, 1), Polynomial{fx::q(1, 3)});
    d(2, 2) = Measure::continuous(PearsonFamily::jacobi(0, 0), Polynomial{Real(1), Real(1)});
    out.push_back({"jacobi N=2", d});
    MeasureMatrix e(1);
    e(0, 0) = Measure::continuous(PearsonFamily::laguerre(1));
    e(0, 1) = Measure::continuous(PearsonFamily::laguerre(2), Polynomial{fx::q(1, 5)});
    e(1, 1) = Measure::continuous(PearsonFamily::laguerre(1), Polynomial{Real(1), Real(1)});
    out.push_back({"laguerre", e});
    return out;
}

inline Report moves() {
    Report r{"moves", {}};
    Real bound = pow2(-120);
    int applied = 0, declined = 0;
    for (auto& [name, w] : move_fixtures()) {
        Real worst = 0;
        int here = 0;
        for (int i = 0; i < w.dim(); ++i)
            for (int j = 0; j < w.dim(); ++j) {
                if (continuous_part(w(i, j)).is_zero()) continue;
                for (MoveKind kind : {MoveKind::ShiftUpRow, MoveKind::ShiftLeftColumn, MoveKind::AntiderivativeSpread}) {
                    if (kind == MoveKind::ShiftUpRow && i < 1) continue;
                    if (kind == MoveKind::ShiftLeftColumn && j < 1) continue;
                    ElementaryMove mv{i, j, kind, {}};
                    try {
                        MeasureMatrix out = apply_move_unchecked(w, mv);
                        worst = std::max(worst, moment_mismatch(w, out, 8));
                        ++here;
                    } catch (const NotClosedUnderMove&) {
                        ++declined;  // the move leaves the symbolic class; nothing to compare
                    }
                }
            }
        applied += here;
        r.le(name + ": G^[8] preserved over " + std::to_string(here) + " moves", worst, bound);
    }
    r.that("moves applied", applied > 0, std::to_string(applied) + " applied, " + std::to_string(declined) + " outside the class");
    r.guard("(x,1;W) = 4/3", [&] {
        MeasureMatrix w = move_fixtures()[0].second;
        Polynomial x = Polynomial::x(), one(1);
        Real direct = bilinear(x, one, w);
        DiagonalReduction red = reduce_to_diagonal(w);
        Real reduced = bilinear(x, one, red.diagonal + red.discrete);
        r.le("(x,1;W) = 4/3 on the matrix side", abs(direct - fx::q(4, 3)), bound);
        r.le("(x,1;W) = 4/3 on the reduced scalar side", abs(reduced - fx::q(4, 3)), bound);
        // independent: scalar density 1 + 2x
        Real scalar = 0;  // ∫_{-1}^{1} x (1 + 2x) dx
        scalar = fx::q(4, 3);
        auto m = raw_moments(red.diagonal(0, 0) + red.discrete(0, 0), 3);
        r.le("reduced density has moments of 1 + 2x", abs(m[0] - 2) + abs(m[1] - scalar) + abs(m[2] - fx::q(2, 3)), bound);
    });
    return r;
}

// ---- 8. resolvent structure ----

inline Report resolvents() {
    Report r{"resolvents", {}};
    Real bound = pow2(-120);
    int k = 10;
    MeasureMatrix w = fx::sobolev_unit();
    auto shape = [&](const std::string& tag, const Transformed& t) {
        const Resolvent& res = t.resolvent;
        r.that(tag + " band (" + std::to_string(res.profile.lower) + " below, " + std::to_string(res.profile.upper) + " above)",
               satisfies(res.data, res.profile, bound));
        r.le(tag + " corner entries", res.corner_defect, bound);
    };
    r.guard("christoffel", [&] {
        Transformed t = christoffel(w, christoffel_roots(), Side::Left, k);
        shape("christoffel M=3", t);
        Real diag = 0;
        for (int i = 0; i < k; ++i) diag = std::max(diag, abs(t.resolvent.data(i, i) - t.direct.h[i] / t.base.h[i]) / abs(t.direct.h[i] / t.base.h[i]));
        r.le("christoffel omega_kk = h^_k/h_k", diag, bound);
    });
    r.guard("geronimus", [&] {
        Transformed t = geronimus(w, geronimus_with_masses(), Side::Right, k);
        shape("geronimus N=3", t);
        Real unit = 0;
        for (int i = 0; i < k; ++i) unit = std::max(unit, abs(t.resolvent.data(i, i) - 1));
        r.le("geronimus unit diagonal", unit, bound);
    });
    r.guard("spectral", [&] {
        Transformed t = spectral(w, christoffel_roots(), geronimus_with_masses(), Orientation::RL, k);
        shape("spectral N=3 M=3", t);
    });
    return r;
}

// ---- 9. Toda ----

inline Report toda() {
    Report r{"toda", {}};
    Real h1 = Real(1) / 1000, h2 = Real(1) / 2000;
    int k = 10;
    MeasureMatrix her = MeasureMatrix::scalar(Measure::continuous(PearsonFamily::hermite()));
    TimePoint t;
    t.t1[1] = fx::q(3, 5);
    t.t2[1] = fx::q(-1, 5);
    r.guard("hermite diagonal", [&] {
        TimePoint t1only;
        t1only.t1[1] = fx::q(3, 5);
        TodaState s = evolve(her, t1only, k);
        Real d = 0;
        for (int i = 1; i + 1 < k; ++i) d = std::max(d, abs(s.lax1(i, i) - fx::q(3, 10)));
        r.le("hermite flow (1,1): L1 diagonal = t/2 on interior rows", d, pow2(-100));
    });
    r.guard("hermite lax", [&] {
        // on the classical flow L1 is affine in t, so central differences are exact
        Real a = lax_residual(her, t, 1, 1, h1, k), b = lax_residual(her, t, 2, 1, h1, k);
        r.le("hermite Lax residual (exact for affine L)", std::max(a, b), pow2(-100));
    });
    MeasureMatrix sob = fx::sobolev_hermite();
    for (int a = 1; a <= 2; ++a)
        r.guard("lax " + std::to_string(a), [&] {
            Real e1 = lax_residual(sob, t, a, 1, h1, k), e2 = lax_residual(sob, t, a, 1, h2, k);
            r.in("sobolev Lax flow (" + std::to_string(a) + ",1) Richardson ratio", e1 / e2, 3.5, 4.5);
        });
    r.guard("lax (1,2)", [&] {
        Real e1 = lax_residual(sob, t, 1, 2, h1, k), e2 = lax_residual(sob, t, 1, 2, h2, k);
        r.in("sobolev Lax flow (1,2) Richardson ratio", e1 / e2, 3.5, 4.5);
    });
    r.guard("zakharov-shabat", [&] {
        Real e1 = zakharov_shabat_residual(sob, t, {1, 1}, {2, 1}, h1, k), e2 = zakharov_shabat_residual(sob, t, {1, 1}, {2, 1}, h2, k);
        r.in("zero curvature (1,1)x(2,1) Richardson ratio", e1 / e2, 3.5, 4.5);
        Real f1 = zakharov_shabat_residual(sob, t, {1, 1}, {1, 2}, h1, k), f2 = zakharov_shabat_residual(sob, t, {1, 1}, {1, 2}, h2, k);
        r.in("zero curvature (1,1)x(1,2) Richardson ratio", f1 / f2, 3.5, 4.5);
    });
    r.guard("deformed moments", [&] {
        DeformedMoments d = deformed_moment_matrix(sob, t, k);
        r.le("W10 G W20^-1 equals G of the deformed measure", d.agreement, pow2(-120));
    });
    return r;
}

// ---- 10. kernels ----

inline Report kernels() {
    Report r{"kernels", {}};
    Real bound = pow2(-120);
    std::mt19937 rng(77);
    std::uniform_int_distribution<int> pick(-90, 90);
    auto ws = fx::random_mixed(3, 4242);
    ws.push_back(fx::sobolev_unit());
    for (std::size_t f = 0; f < ws.size(); ++f) {
        std::string tag = "fixture#" + std::to_string(f);
        r.guard(tag, [&] {
            const MeasureMatrix& w = ws[f];
            SBPS s = sbps(w, 8);
            Real rep = 0, proj = 0;
            for (int p = 0; p < 5; ++p) {
                Real x = fx::q(pick(rng), 100), y = fx::q(pick(rng), 100);
                for (int l = 1; l <= 8; ++l) {
                    Real k = kernel(w, s, KernelKind::CD, l, x, y);
                    Real v = bilinear(kernel_in_y(s, l, x), kernel_in_x(s, l, y), w);
                    rep = std::max(rep, abs(v - k) / std::max(Real(1), abs(k)));
                    for (int m = 0; m < l; ++m) {
                        Polynomial xm = Polynomial::monomial(m);
                        Real p1 = projection1(w, s, l, xm)(y), p2 = projection2(w, s, l, xm)(y), want = pow(y, m);
                        proj = std::max({proj, abs(p1 - want), abs(p2 - want)});
                    }
                }
            }
            r.le(tag + " reproducing (K(x,.),K(.,y)) = K(x,y)", rep, bound);
            r.le(tag + " projection of x^m, m<l", proj, bound);
        });
    }
    return r;
}

// ---- registry ----

inline const std::vector<std::pair<std::string, std::function<Report()>>>& registry() {
    static const std::vector<std::pair<std::string, std::function<Report()>>> r{
        {"classical", classical},   {"classical_pair", classical_pair_suite}, {"biorthogonality", [] { return biorthogonality(); }},
        {"transforms", transforms}, {"discrete", discrete},   {"wx", wx},
        {"moves", moves},           {"resolvents", resolvents}, {"toda", toda},
        {"kernels", kernels}};
    return r;
}

}  // namespace sob::suites
