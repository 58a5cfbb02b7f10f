#pragma once

#include "real.hpp"

#include <algorithm>
#include <initializer_list>
#include <vector>

namespace sob {

// Dense polynomial, coeffs[k] multiplies x^k. Zero polynomial has no coefficients.
class Polynomial {
public:
    Polynomial() = default;
    explicit Polynomial(std::vector<Real> c) : c_(std::move(c)) { trim(); }
    Polynomial(std::initializer_list<Real> c) : c_(c) { trim(); }
    Polynomial(const Real& constant) : c_{constant} { trim(); }  // NOLINT: implicit scalar lift
    Polynomial(int constant) : Polynomial(Real(constant)) {}     // NOLINT

    static Polynomial monomial(int k, const Real& a = Real(1)) {
        std::vector<Real> c(k + 1, Real(0));
        c[k] = a;
        return Polynomial(std::move(c));
    }
    static Polynomial x() { return monomial(1); }

    // prod (x - r_i)^{m_i}
    static Polynomial from_roots(const std::vector<std::pair<Real, int>>& roots) {
        Polynomial p(1);
        for (auto& [r, m] : roots)
            for (int i = 0; i < m; ++i) p *= Polynomial{-r, Real(1)};
        return p;
    }

    int degree() const { return static_cast<int>(c_.size()) - 1; }
    bool is_zero() const { return c_.empty(); }
    std::size_t size() const { return c_.size(); }
    const std::vector<Real>& coeffs() const { return c_; }
    Real operator[](int k) const { return (k >= 0 && k < static_cast<int>(c_.size())) ? c_[k] : Real(0); }
    Real lead() const { return c_.empty() ? Real(0) : c_.back(); }

    Real operator()(const Real& x) const {
        Real s = 0;
        for (auto it = c_.rbegin(); it != c_.rend(); ++it) s = s * x + *it;
        return s;
    }

    // Taylor coefficients p^{(t)}(x)/t!, t = 0..n-1
    std::vector<Real> taylor(const Real& x, int n) const {
        std::vector<Real> b(c_.begin(), c_.end());
        std::vector<Real> out(n, Real(0));
        int d = static_cast<int>(b.size());
        for (int t = 0; t < n && t < d; ++t) {
            // synthetic division repeated: remainder is the next Taylor coefficient
            for (int i = d - 2; i >= t; --i) b[i] += x * b[i + 1];
            out[t] = b[t];
        }
        // the loop above leaves b[t] as coefficient of (x-a)^t
        return out;
    }

    Polynomial derivative(int n = 1) const {
        if (n == 0) return *this;
        if (degree() < n) return {};
        std::vector<Real> d(c_.size() - n);
        for (std::size_t k = n; k < c_.size(); ++k) {
            Real f = 1;
            for (int j = 0; j < n; ++j) f *= static_cast<long>(k - j);
            d[k - n] = c_[k] * f;
        }
        return Polynomial(std::move(d));
    }

    // antiderivative vanishing at `a`
    Polynomial antiderivative(const Real& a = Real(0)) const {
        std::vector<Real> d(c_.size() + 1, Real(0));
        for (std::size_t k = 0; k < c_.size(); ++k) d[k + 1] = c_[k] / static_cast<long>(k + 1);
        Polynomial p(std::move(d));
        return p - Polynomial(p(a));
    }

    Polynomial& operator+=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Real(0));
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] += o.c_[k];
        trim();
        return *this;
    }
    Polynomial& operator-=(const Polynomial& o) {
        if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), Real(0));
        for (std::size_t k = 0; k < o.c_.size(); ++k) c_[k] -= o.c_[k];
        trim();
        return *this;
    }
    Polynomial& operator*=(const Polynomial& o) { return *this = *this * o; }
    Polynomial& operator*=(const Real& s) {
        for (auto& v : c_) v *= s;
        trim();
        return *this;
    }

    friend Polynomial operator+(Polynomial a, const Polynomial& b) { return a += b; }
    friend Polynomial operator-(Polynomial a, const Polynomial& b) { return a -= b; }
    friend Polynomial operator-(Polynomial a) { return a *= Real(-1); }
    friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
        if (a.is_zero() || b.is_zero()) return {};
        std::vector<Real> c(a.c_.size() + b.c_.size() - 1, Real(0));
        for (std::size_t i = 0; i < a.c_.size(); ++i)
            for (std::size_t j = 0; j < b.c_.size(); ++j) c[i + j] += a.c_[i] * b.c_[j];
        return Polynomial(std::move(c));
    }
    friend Polynomial operator*(Polynomial a, const Real& s) { return a *= s; }
    friend Polynomial operator*(const Real& s, Polynomial a) { return a *= s; }
    friend Polynomial operator/(Polynomial a, const Real& s) { return a *= Real(1) / s; }

    friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.c_ == b.c_; }

    Polynomial pow(int n) const {
        Polynomial r(1);
        for (int i = 0; i < n; ++i) r *= *this;
        return r;
    }

    // quotient and remainder of division by d (d nonzero)
    std::pair<Polynomial, Polynomial> divmod(const Polynomial& d) const {
        if (d.is_zero()) throw DomainError("division by zero polynomial");
        std::vector<Real> r = c_;
        int dd = d.degree();
        if (degree() < dd) return {{}, *this};
        std::vector<Real> q(degree() - dd + 1, Real(0));
        for (int k = degree() - dd; k >= 0; --k) {
            q[k] = r[k + dd] / d.lead();
            for (int j = 0; j <= dd; ++j) r[k + j] -= q[k] * d.c_[j];
        }
        r.resize(dd);
        return {Polynomial(std::move(q)), Polynomial(std::move(r))};
    }

    Real max_abs() const {
        Real m = 0;
        for (auto& v : c_) m = std::max(m, abs(v));
        return m;
    }

    // max coefficient distance relative to the larger operand
    static Real rel_distance(const Polynomial& a, const Polynomial& b) {
        Real scale = std::max(std::max(a.max_abs(), b.max_abs()), Real(1e-300));
        return (a - b).max_abs() / scale;
    }

private:
    void trim() {
        while (!c_.empty() && c_.back() == 0) c_.pop_back();
    }
    std::vector<Real> c_;
};

}  // namespace sob
