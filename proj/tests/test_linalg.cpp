#include "common.hpp"

using namespace sob;
using testing_support::Near;
using testing_support::PolyNear;
using testing_support::q;

TEST(Polynomial, ArithmeticAndEvaluation) {
    Polynomial p{Real(1), Real(-3), Real(2)};  // (1-x)(1-2x)
    EXPECT_EQ(p.degree(), 2);
    EXPECT_TRUE(Near(p(q(1, 2)), Real(0), 250));
    EXPECT_TRUE(Near(p(Real(3)), Real(10), 250));
    Polynomial r = Polynomial::from_roots({{Real(1), 1}, {q(1, 2), 1}});
    EXPECT_TRUE(PolyNear(r * Real(2), p, 250));
    auto [quot, rem] = (p * Polynomial{Real(5), Real(1)} + Polynomial(Real(7))).divmod(p);
    EXPECT_TRUE(PolyNear(quot, Polynomial{Real(5), Real(1)}, 240));
    EXPECT_TRUE(Near(rem[0], Real(7), 240));
}

TEST(Polynomial, TaylorMatchesDerivatives) {
    Polynomial p{Real(2), Real(-1), Real(0), Real(4), Real(1)};
    Real x = q(-3, 7);
    auto t = p.taylor(x, 6);
    Real fact = 1;
    for (int k = 0; k < 6; ++k) {
        if (k > 0) fact *= k;
        EXPECT_TRUE(Near(t[k], p.derivative(k)(x) / fact, 240)) << k;
    }
}

TEST(Polynomial, AntiderivativeVanishesAtBase) {
    Polynomial p{Real(1), Real(2), Real(3)};
    Polynomial a = p.antiderivative(Real(-1));
    EXPECT_TRUE(Near(a(Real(-1)), Real(0), 250));
    EXPECT_TRUE(PolyNear(a.derivative(), p, 250));
}

TEST(Matrix, SolveAndInverseOnHilbert) {
    int n = 8;
    Matrix h(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) h(i, j) = Real(1) / (i + j + 1);
    Matrix inv = inverse(h);
    // closed-form first entry of the inverse Hilbert matrix: n^2
    EXPECT_TRUE(Near(inv(0, 0), Real(n * n), 200));
    EXPECT_LE(rel_diff(h * inv, Matrix::identity(n), Real(1)), pow2(-200));
}

TEST(Matrix, DeterminantOfVandermonde) {
    std::vector<Real> x{Real(-1), q(1, 3), Real(2), Real(5)};
    int n = 4;
    Matrix v(n, n);
    Real want = 1;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) v(i, j) = pow(x[i], j);
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) want *= x[j] - x[i];
    EXPECT_TRUE(Near(det(v), want, 240));
}

TEST(Matrix, QuasiDeterminantIsDeterminantRatio) {
    Matrix m(4, 4);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) m(i, j) = Real(1) / (i + 2 * j + 1) + (i == j ? Real(1) : Real(0));
    Vector b{m(0, 3), m(1, 3), m(2, 3)}, c{m(3, 0), m(3, 1), m(3, 2)};
    Real th = theta_star(m.lead(3), b, c, m(3, 3));
    EXPECT_TRUE(Near(th, det(m) / det(m.lead(3)), 240));
    EXPECT_TRUE(Near(schur_complement(m, 3)(0, 0), th, 240));
}

TEST(Matrix, SchurComplementReassembles) {
    int n = 6, s = 2;
    Matrix m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = Real(1) / (1 + i + j) + (i == j ? Real(2) : Real(0));
    Matrix a = m.lead(s), sc = schur_complement(m, s);
    Matrix ainv_b = solve(a, m.block(0, s, s, n - s));
    // [A B; C D] = [I 0; C A^-1 I][A 0; 0 S][I A^-1 B; 0 I]
    Matrix l = Matrix::identity(n), d(n, n), u = Matrix::identity(n);
    l.set_block(s, 0, m.block(s, 0, n - s, s) * inverse(a));
    d.set_block(0, 0, a);
    d.set_block(s, s, sc);
    u.set_block(0, s, ainv_b);
    EXPECT_LE(rel_diff(l * d * u, m), pow2(-236));
}

TEST(Matrix, SingularSolveThrows) {
    Matrix m(2, 2);
    m(0, 0) = 1;
    m(0, 1) = 2;
    m(1, 0) = 2;
    m(1, 1) = 4;
    EXPECT_THROW(inverse(m), SingularBlock);
}

TEST(Matrix, ShiftActsOnMonomialStack) {
    // Λ χ(x) = x χ(x) up to the truncated last row
    Matrix l = shift_matrix(3);
    Real x = q(5, 3);
    Vector chi{Real(1), x, x * x};
    for (int i = 0; i < 2; ++i) {
        Real s = 0;
        for (int j = 0; j < 3; ++j) s += l(i, j) * chi[j];
        EXPECT_TRUE(Near(s, x * chi[i], 250));
    }
}

TEST(Matrix, BandProfile) {
    Matrix m(5, 5);
    for (int i = 0; i < 5; ++i) {
        m(i, i) = 1;
        if (i + 2 < 5) m(i, i + 2) = 3;
        if (i > 0) m(i, i - 1) = -1;
    }
    BandProfile p = band_of(m);
    EXPECT_EQ(p.lower, 1);
    EXPECT_EQ(p.upper, 2);
    EXPECT_TRUE(satisfies(m, {1, 2}));
    EXPECT_FALSE(satisfies(m, {1, 1}));
}

TEST(Real, ParsesDecimalStringsAtPrecision) {
    Real third = parse_real("0.3333333333333333333333333333333333333333333333333333333333333333333333333333333");
    EXPECT_TRUE(Near(third * 3, Real(1), 250));
    EXPECT_THROW(parse_real("1/3"), ParseError);
    EXPECT_THROW(parse_real(""), ParseError);
    EXPECT_TRUE(Near(parse_real(to_string(q(1, 7))), q(1, 7), 250));
}
