#pragma once

#include "diffop.hpp"
#include "quadrature.hpp"

#include <limits>
#include <optional>

namespace sob {

struct PearsonFamily {
    enum class Kind { Hermite, Laguerre, Jacobi, Uniform };
    Kind kind = Kind::Hermite;
    Real alpha = 0, beta = 0;  // Laguerre α; Jacobi (α, β); Uniform interval (a, b)

    static PearsonFamily hermite() { return {Kind::Hermite, 0, 0}; }
    static PearsonFamily laguerre(const Real& a) { return checked({Kind::Laguerre, a, 0}); }
    static PearsonFamily jacobi(const Real& a, const Real& b) { return checked({Kind::Jacobi, a, b}); }
    static PearsonFamily uniform(const Real& a, const Real& b) { return checked({Kind::Uniform, a, b}); }

    static PearsonFamily checked(PearsonFamily f) {
        f.validate();
        return f;
    }
    void validate() const {
        switch (kind) {
            case Kind::Laguerre:
                if (!(alpha > -1)) throw ParameterOutOfRange("Laguerre requires alpha > -1");
                break;
            case Kind::Jacobi:
                if (!(alpha > -1 && beta > -1)) throw ParameterOutOfRange("Jacobi requires alpha, beta > -1");
                break;
            case Kind::Uniform:
                if (!(alpha < beta)) throw ParameterOutOfRange("uniform interval requires a < b");
                break;
            default:
                break;
        }
    }

    bool classical() const { return kind != Kind::Uniform; }
    bool bounded() const { return kind == Kind::Jacobi || kind == Kind::Uniform; }
    // support endpoints; nullopt means infinite
    std::optional<Real> lo() const {
        switch (kind) {
            case Kind::Hermite: return std::nullopt;
            case Kind::Laguerre: return Real(0);
            case Kind::Jacobi: return Real(-1);
            default: return alpha;
        }
    }
    std::optional<Real> hi() const {
        switch (kind) {
            case Kind::Jacobi: return Real(1);
            case Kind::Uniform: return beta;
            default: return std::nullopt;
        }
    }

    // Pearson data p2 u' = p1 u
    Polynomial p2() const {
        switch (kind) {
            case Kind::Hermite: return Polynomial(1);
            case Kind::Laguerre: return Polynomial::x();
            case Kind::Jacobi: return Polynomial{Real(1), Real(0), Real(-1)};
            default: throw NotClassical("uniform measure has no classical Pearson data");
        }
    }
    Polynomial p1() const {
        switch (kind) {
            case Kind::Hermite: return Polynomial{Real(0), Real(-2)};
            case Kind::Laguerre: return Polynomial{alpha, Real(-1)};
            case Kind::Jacobi: return Polynomial{beta - alpha, -(alpha + beta)};
            default: throw NotClassical("uniform measure has no classical Pearson data");
        }
    }

    friend bool operator==(const PearsonFamily& a, const PearsonFamily& b) {
        return a.kind == b.kind && a.alpha == b.alpha && a.beta == b.beta;
    }
};

struct Atom {
    Real point, mass;
};

// factor(x) * exp(tilt(x)) * u(x) dx
struct Term {
    PearsonFamily base;
    Polynomial factor{1};
    Polynomial tilt{};
};

// One measure entry: sum of weighted classical densities plus point masses.
struct Measure {
    std::vector<Term> terms;
    std::vector<Atom> atoms;

    static Measure continuous(const PearsonFamily& f, const Polynomial& factor = Polynomial(1)) {
        Measure m;
        if (!factor.is_zero()) m.terms.push_back({f, factor, {}});
        return m;
    }
    static Measure point(const Real& x, const Real& mass) {
        Measure m;
        if (mass != 0) m.atoms.push_back({x, mass});
        return m;
    }

    bool is_zero() const { return terms.empty() && atoms.empty(); }

    Measure& operator+=(const Measure& o) {
        for (auto& t : o.terms) {
            bool merged = false;
            for (auto& s : terms)
                if (s.base == t.base && s.tilt == t.tilt) {
                    s.factor += t.factor;
                    merged = true;
                    break;
                }
            if (!merged) terms.push_back(t);
        }
        for (auto& a : o.atoms) {
            bool merged = false;
            for (auto& b : atoms)
                if (b.point == a.point) {
                    b.mass += a.mass;
                    merged = true;
                    break;
                }
            if (!merged) atoms.push_back(a);
        }
        prune();
        return *this;
    }
    friend Measure operator+(Measure a, const Measure& b) { return a += b; }

    // multiply by a polynomial: densities absorb it, atoms are reweighted
    friend Measure operator*(const Polynomial& p, Measure m) {
        for (auto& t : m.terms) t.factor = p * t.factor;
        for (auto& a : m.atoms) a.mass *= p(a.point);
        m.prune();
        return m;
    }
    friend Measure operator*(const Real& c, Measure m) { return Polynomial(c) * std::move(m); }
    friend Measure operator-(Measure m) { return Real(-1) * std::move(m); }

    // multiply densities by exp(s(x)); atoms by exp(s(point))
    Measure tilted(const Polynomial& s) const {
        Measure m = *this;
        for (auto& t : m.terms) t.tilt += s;
        for (auto& a : m.atoms) a.mass *= boost::multiprecision::exp(s(a.point));
        return m;
    }

    void prune() {
        std::erase_if(terms, [](const Term& t) { return t.factor.is_zero(); });
        std::erase_if(atoms, [](const Atom& a) { return a.mass == 0; });
    }

    // convex hull of the support
    std::pair<Real, Real> hull() const {
        Real inf = std::numeric_limits<double>::infinity();
        Real lo = inf, hi = -inf;
        for (auto& t : terms) {
            auto l = t.base.lo(), h = t.base.hi();
            lo = std::min(lo, l ? *l : -inf);
            hi = std::max(hi, h ? *h : inf);
        }
        for (auto& a : atoms) {
            lo = std::min(lo, a.point);
            hi = std::max(hi, a.point);
        }
        return {lo, hi};
    }
};

// ---- moments ----

namespace detail {

inline Real tgamma(const Real& x) { return boost::multiprecision::tgamma(x); }

// ∫ x^n e^{tilt} u dx, n = 0..count-1, for a single classical/uniform base
inline std::vector<Real> base_moments(const PearsonFamily& f, const Polynomial& tilt, int count) {
    using K = PearsonFamily::Kind;
    std::vector<Real> mu(std::max(count, 0), Real(0));
    if (count <= 0) return mu;
    f.validate();
    Real c0 = tilt[0];
    int td = tilt.degree();
    auto scale = [&](Real s) {
        for (auto& v : mu) v *= s;
    };
    switch (f.kind) {
        case K::Hermite: {
            if (td > 2) throw ParameterOutOfRange("Hermite tilt must have degree <= 2");
            Real c = 1 - tilt[2], b = tilt[1];
            if (!(c > 0)) throw ParameterOutOfRange("Hermite tilt destroys integrability");
            Real pi = boost::multiprecision::acos(Real(-1));
            mu[0] = boost::multiprecision::sqrt(pi / c) * boost::multiprecision::exp(b * b / (4 * c));
            // ∫ x^{n+1} w = (n ∫x^{n-1} w + b ∫ x^n w) / (2c)
            for (int n = 0; n + 1 < count; ++n) mu[n + 1] = ((n > 0 ? n * mu[n - 1] : Real(0)) + b * mu[n]) / (2 * c);
            break;
        }
        case K::Laguerre: {
            if (td > 1) throw ParameterOutOfRange("Laguerre tilt must have degree <= 1");
            Real s = 1 - tilt[1];
            if (!(s > 0)) throw ParameterOutOfRange("Laguerre tilt destroys integrability");
            mu[0] = tgamma(f.alpha + 1) / pow(s, f.alpha + 1);
            for (int n = 1; n < count; ++n) mu[n] = mu[n - 1] * (n + f.alpha) / s;
            break;
        }
        case K::Jacobi: {
            if (td >= 1) {
                Polynomial t1 = tilt - Polynomial(c0);
                mu = gauss_jacobi_integrate(f.alpha, f.beta, count, [&](const Real& x, std::vector<Real>& out) {
                    Real e = boost::multiprecision::exp(t1(x)), p = 1;
                    for (int n = 0; n < count; ++n, p *= x) out[n] = p * e;
                });
                break;
            }
            // Pearson recurrence: (n+2+α+β) ν_{n+1} = n ν_{n-1} + (β-α) ν_n
            Real a = f.alpha, b = f.beta;
            mu[0] = pow(Real(2), a + b + 1) * tgamma(a + 1) * tgamma(b + 1) / tgamma(a + b + 2);
            for (int n = 0; n + 1 < count; ++n)
                mu[n + 1] = ((n > 0 ? n * mu[n - 1] : Real(0)) + (b - a) * mu[n]) / (n + 2 + a + b);
            break;
        }
        case K::Uniform: {
            Real a = f.alpha, b = f.beta;
            if (td >= 1) {
                Polynomial t1 = tilt - Polynomial(c0);
                Real h = (b - a) / 2, m = (a + b) / 2;
                mu = gauss_jacobi_integrate(Real(0), Real(0), count, [&](const Real& t, std::vector<Real>& out) {
                    Real x = m + h * t;
                    Real e = boost::multiprecision::exp(t1(x)) * h, p = 1;
                    for (int n = 0; n < count; ++n, p *= x) out[n] = p * e;
                });
                break;
            }
            Real pa = a, pb = b;
            for (int n = 0; n < count; ++n) {
                mu[n] = (pb - pa) / (n + 1);
                pa *= a;
                pb *= b;
            }
            break;
        }
    }
    if (c0 != 0) scale(boost::multiprecision::exp(c0));
    return mu;
}

}  // namespace detail

// μ_n = ∫ x^n dμ, n = 0..count-1
inline std::vector<Real> raw_moments(const Measure& m, int count) {
    std::vector<Real> mu(std::max(count, 0), Real(0));
    for (auto& t : m.terms) {
        int d = std::max(t.factor.degree(), 0);
        auto nu = detail::base_moments(t.base, t.tilt, count + d);
        for (int n = 0; n < count; ++n)
            for (int i = 0; i <= t.factor.degree(); ++i) mu[n] += t.factor[i] * nu[n + i];
    }
    for (auto& a : m.atoms) {
        Real p = 1;
        for (int n = 0; n < count; ++n, p *= a.point) mu[n] += a.mass * p;
    }
    return mu;
}

// Hankel g_{ij} = μ_{i+j}
inline Matrix standard_moment_matrix(const Measure& m, int k) {
    auto mu = raw_moments(m, 2 * k - 1);
    Matrix g(k, k);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < k; ++j) g(i, j) = mu[i + j];
    return g;
}

// ∫ f dμ for an arbitrary function; continuous parts need bounded support.
// Evaluates `count` integrands at once; eval(x, out) fills the values at x.
inline std::vector<Real> integrate(const Measure& m, int count,
                                   const std::function<void(const Real&, std::vector<Real>&)>& eval) {
    std::vector<Real> acc(count, Real(0)), vals(count);
    for (auto& t : m.terms) {
        const auto& f = t.base;
        if (!f.bounded()) throw DomainError("numerical integration requires a bounded support");
        Real al = 0, be = 0, h = 1, c = 0;
        if (f.kind == PearsonFamily::Kind::Jacobi) {
            al = f.alpha;
            be = f.beta;
        } else {
            h = (f.beta - f.alpha) / 2;
            c = (f.beta + f.alpha) / 2;
        }
        auto part = gauss_jacobi_integrate(al, be, count, [&](const Real& s, std::vector<Real>& out) {
            Real x = c + h * s;
            eval(x, out);
            Real w = t.factor(x) * h;
            if (!t.tilt.is_zero()) w *= boost::multiprecision::exp(t.tilt(x));
            for (auto& v : out) v *= w;
        });
        for (int i = 0; i < count; ++i) acc[i] += part[i];
    }
    for (auto& a : m.atoms) {
        eval(a.point, vals);
        for (int i = 0; i < count; ++i) acc[i] += a.mass * vals[i];
    }
    return acc;
}

// ---- Pearson operators ----

// 𝒪_k = p2 d/dx + (k p2' + p1)
inline DiffOperator pearson_O(const PearsonFamily& f, int k) {
    Polynomial p2 = f.p2(), p1 = f.p1();
    return {{p2.derivative() * Real(k) + p1, p2}};
}

// chain 𝒪_j ∘ 𝒪_{j+1} ∘ ... ∘ 𝒪_k; j = k+1 gives the identity
inline DiffOperator pearson_step_operator(const PearsonFamily& f, int k, int j) {
    if (!f.classical()) throw NotClassical("Pearson operators need a classical family");
    if (j < 0 || j > k + 1) throw ParameterOutOfRange("depth out of range");
    DiffOperator op = DiffOperator::identity();
    for (int i = j; i <= k; ++i) op = compose(op, pearson_O(f, i));
    return op;
}

// d^r/dx^r (p2^k u) = φ_{k,r} u
inline Polynomial phi_polynomial(const PearsonFamily& f, int k, int r) {
    if (!f.classical()) throw NotClassical("φ polynomials need a classical family");
    if (r < 0 || r > k) throw ParameterOutOfRange("need 0 <= r <= k");
    return pearson_step_operator(f, k, k - r + 1)(Polynomial(1)) * f.p2().pow(k - r);
}

// u_{γ+k} expressed on the base u_γ
inline Measure shifted_classical(const PearsonFamily& f, int k, const Real& scale = Real(1)) {
    return Measure::continuous(f, f.p2().pow(k) * scale);
}

}  // namespace sob
