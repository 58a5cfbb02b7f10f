#pragma once

#include "matrix.hpp"

namespace sob {

// L = sum_r coef[r](x) d^r/dx^r
struct DiffOperator {
    std::vector<Polynomial> coef;

    static DiffOperator identity() { return {{Polynomial(1)}}; }
    static DiffOperator derivative(int r = 1) {
        DiffOperator d;
        d.coef.assign(r + 1, Polynomial());
        d.coef[r] = Polynomial(1);
        return d;
    }
    static DiffOperator multiply(const Polynomial& p) { return {{p}}; }

    int order() const { return static_cast<int>(coef.size()) - 1; }
    Polynomial at(int r) const { return r < static_cast<int>(coef.size()) ? coef[r] : Polynomial(); }

    Polynomial operator()(const Polynomial& f) const {
        Polynomial s;
        for (int r = 0; r <= order(); ++r) s += coef[r] * f.derivative(r);
        return s;
    }

    friend DiffOperator operator+(const DiffOperator& a, const DiffOperator& b) {
        DiffOperator s;
        s.coef.resize(std::max(a.coef.size(), b.coef.size()));
        for (int r = 0; r < static_cast<int>(s.coef.size()); ++r) s.coef[r] = a.at(r) + b.at(r);
        return s;
    }
    friend DiffOperator operator*(const Real& c, DiffOperator a) {
        for (auto& p : a.coef) p *= c;
        return a;
    }

    // (a ∘ b)[f] = a[b[f]]
    friend DiffOperator compose(const DiffOperator& a, const DiffOperator& b) {
        DiffOperator s;
        s.coef.assign(std::max(0, a.order() + b.order()) + 1, Polynomial());
        for (int r = 0; r <= a.order(); ++r)
            for (int t = 0; t <= b.order(); ++t)
                for (int i = 0; i <= r; ++i) {
                    // a_r * d^r (b_t f^{(t)}) = a_r * sum_i C(r,i) b_t^{(i)} f^{(t+r-i)}
                    Polynomial c = a.coef[r] * b.coef[t].derivative(i) * binomial(r, i);
                    s.coef[t + r - i] += c;
                }
        return s;
    }
};

// Moment-side face Σ a_{n,s} D^s Λ^n: row i, column i - s + n carries (i)_s a_{n,s}.
// `cols` may exceed `rows` to hold the band that reaches past the truncation.
inline Matrix moment_face(const DiffOperator& op, int rows, int cols) {
    Matrix m(rows, cols);
    for (int s = 0; s <= op.order(); ++s) {
        const Polynomial& p = op.coef[s];
        for (int i = s; i < rows; ++i) {
            Real f = 1;
            for (int t = 0; t < s; ++t) f *= (i - t);
            for (int n = 0; n <= p.degree(); ++n)
                if (i - s + n < cols) m(i, i - s + n) += p[n] * f;
        }
    }
    return m;
}

}  // namespace sob
