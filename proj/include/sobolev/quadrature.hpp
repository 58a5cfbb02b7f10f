#pragma once

#include "matrix.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>

namespace sob {

// Monic three-term recurrence p_{n+1} = (x - a_n) p_n - b_n p_{n-1} for the Jacobi weight (1-x)^α(1+x)^β.
inline std::pair<Real, Real> jacobi_recurrence(const Real& al, const Real& be, int n) {
    Real s = al + be;
    Real a, b;
    if (n == 0) {
        a = (be - al) / (s + 2);
    } else {
        Real t = 2 * n + s;
        a = (be * be - al * al) / (t * (t + 2));
    }
    if (n == 0) {
        b = 0;
    } else if (n == 1) {
        b = 4 * (1 + al) * (1 + be) / ((2 + s) * (2 + s) * (3 + s));
    } else {
        Real t = 2 * n + s;
        b = 4 * n * (n + al) * (n + be) * (n + s) / (t * t * (t + 1) * (t - 1));
    }
    return {a, b};
}

struct GaussRule {
    std::vector<Real> nodes, weights;
};

namespace detail {

// eigenvalues of a symmetric tridiagonal matrix (implicit QL), long double seeds for Newton
inline std::vector<long double> tridiag_eigenvalues(std::vector<long double> d, std::vector<long double> e) {
    int n = static_cast<int>(d.size());
    e.push_back(0);
    for (int l = 0; l < n; ++l) {
        int iter = 0;
        int m;
        do {
            for (m = l; m < n - 1; ++m) {
                long double dd = std::fabs(d[m]) + std::fabs(d[m + 1]);
                if (std::fabs(e[m]) <= std::numeric_limits<long double>::epsilon() * dd) break;
            }
            if (m != l) {
                if (++iter > 200) break;
                long double g = (d[l + 1] - d[l]) / (2 * e[l]);
                long double r = std::hypot(g, 1.0L);
                g = d[m] - d[l] + e[l] / (g + (g >= 0 ? std::fabs(r) : -std::fabs(r)));
                long double s = 1, c = 1, p = 0;
                int i;
                for (i = m - 1; i >= l; --i) {
                    long double f = s * e[i], b = c * e[i];
                    r = std::hypot(f, g);
                    e[i + 1] = r;
                    if (r == 0) {
                        d[i + 1] -= p;
                        e[m] = 0;
                        break;
                    }
                    s = f / r;
                    c = g / r;
                    g = d[i + 1] - p;
                    r = (d[i] - g) * s + 2 * c * b;
                    p = s * r;
                    d[i + 1] = g + p;
                    g = c * r - b;
                }
                if (r == 0 && i >= l) continue;
                d[l] -= p;
                e[l] = g;
                e[m] = 0;
            }
        } while (m != l);
    }
    std::sort(d.begin(), d.end());
    return d;
}

inline GaussRule build_gauss_jacobi(const Real& al, const Real& be, int n) {
    std::vector<Real> a(n), b(n + 1);
    for (int k = 0; k < n; ++k) {
        auto [ak, bk] = jacobi_recurrence(al, be, k);
        a[k] = ak;
        b[k] = bk;
    }
    b[n] = jacobi_recurrence(al, be, n).second;
    std::vector<long double> d(n), e(n > 0 ? n - 1 : 0);
    for (int k = 0; k < n; ++k) d[k] = static_cast<long double>(a[k]);
    for (int k = 1; k < n; ++k) e[k - 1] = std::sqrt(static_cast<long double>(b[k]));
    auto seeds = tridiag_eigenvalues(d, e);

    Real nu0 = pow(Real(2), al + be + 1) * boost::multiprecision::tgamma(al + 1) * boost::multiprecision::tgamma(be + 1) /
               boost::multiprecision::tgamma(al + be + 2);
    std::vector<Real> norms(n);
    norms[0] = nu0;
    for (int k = 1; k < n; ++k) norms[k] = norms[k - 1] * b[k];

    GaussRule g;
    g.nodes.resize(n);
    g.weights.resize(n);
    Real stop = pow2(-static_cast<int>(Precision::bits()) + 8);
    for (int i = 0; i < n; ++i) {
        Real x = static_cast<double>(seeds[i]);
        x += Real(static_cast<double>(seeds[i] - static_cast<long double>(static_cast<double>(seeds[i]))));
        for (int it = 0; it < 60; ++it) {
            Real p0 = 1, p1 = x - a[0], d0 = 0, d1 = 1;
            if (n == 1) p1 = x - a[0];
            for (int k = 1; k < n; ++k) {
                Real p2 = (x - a[k]) * p1 - b[k] * p0;
                Real d2 = p1 + (x - a[k]) * d1 - b[k] * d0;
                p0 = p1;
                p1 = p2;
                d0 = d1;
                d1 = d2;
            }
            Real dx = p1 / d1;
            x -= dx;
            if (abs(dx) <= stop) break;
        }
        g.nodes[i] = x;
        Real s = 0, q0 = 0, q1 = 1;
        for (int k = 0; k < n; ++k) {
            s += q1 * q1 / norms[k];
            Real q2 = (x - a[k]) * q1 - b[k] * q0;
            q0 = q1;
            q1 = q2;
        }
        g.weights[i] = 1 / s;
    }
    return g;
}

}  // namespace detail

// Gauss rule for ∫_{-1}^{1} f(x)(1-x)^α(1+x)^β dx; cached per (α, β, n, precision).
inline std::shared_ptr<const GaussRule> gauss_jacobi(const Real& al, const Real& be, int n) {
    using Key = std::tuple<std::string, std::string, int, unsigned>;
    static std::mutex mu;
    static std::map<Key, std::shared_ptr<const GaussRule>> cache;
    Key key{al.str(40), be.str(40), n, Precision::bits()};
    {
        std::lock_guard<std::mutex> lock(mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }
    auto rule = std::make_shared<const GaussRule>(detail::build_gauss_jacobi(al, be, n));
    std::lock_guard<std::mutex> lock(mu);
    cache.emplace(key, rule);
    return rule;
}

// Adaptive (node-doubling) Gauss–Jacobi integration of `count` functions at once.
// eval(x, out) fills out[0..count) with the integrand values (weight excluded).
inline std::vector<Real> gauss_jacobi_integrate(const Real& al, const Real& be, int count,
                                                const std::function<void(const Real&, std::vector<Real>&)>& eval,
                                                int n0 = 32, int nmax = 1024) {
    Real target = tol();
    std::vector<Real> prev;
    std::vector<Real> vals(count);
    for (int n = n0; n <= nmax; n *= 2) {
        auto rule = gauss_jacobi(al, be, n);
        std::vector<Real> acc(count, Real(0)), mag(count, Real(0));
        for (int i = 0; i < n; ++i) {
            eval(rule->nodes[i], vals);
            for (int c = 0; c < count; ++c) {
                Real t = rule->weights[i] * vals[c];
                acc[c] += t;
                mag[c] += abs(t);
            }
        }
        if (!prev.empty()) {
            bool ok = true;
            for (int c = 0; c < count && ok; ++c) ok = abs(acc[c] - prev[c]) <= target * std::max(mag[c], Real(1e-300));
            if (ok) return acc;
        }
        prev = std::move(acc);
    }
    throw DomainError("quadrature did not converge (singularity too close to the support?)");
}

}  // namespace sob
