#include "common.hpp"

#include "sobolev/operator.hpp"
#include "suites.hpp"

using namespace sob;
using testing_support::Near;
using testing_support::PolyNear;
using testing_support::q;

namespace {
const Real kBound = pow2(-120);

DiffOperator one_minus_d() { return DiffOperator{{Polynomial(1), Polynomial(-1)}}; }
DiffOperator x_plus_d() { return DiffOperator{{Polynomial::x(), Polynomial(1)}}; }
Measure hermite() { return Measure::continuous(PearsonFamily::hermite()); }
}  // namespace

TEST(Faces, MultiplicationByXIsTheShift) {
    Matrix m = moment_face(DiffOperator::multiply(Polynomial::x()), 5, 6);
    Matrix s = shift_matrix(6).block(0, 0, 5, 6);
    EXPECT_LE(rel_diff(m, s), kBound);
    EXPECT_EQ(face_reach(DiffOperator::multiply(Polynomial::x())), 1);
}

TEST(Faces, TaylorShiftIsBinomial) {
    // Σ D^k/k! is f(x) -> f(x + 1): x^l -> Σ_j C(l, j) x^j
    DiffOperator op;
    Real f = 1;
    for (int k = 0; k < 6; ++k) {
        if (k > 0) f *= k;
        op.coef.push_back(Polynomial(1 / f));
    }
    Matrix m = moment_face(op, 6, 6);
    for (int l = 0; l < 6; ++l)
        for (int j = 0; j < 6; ++j) EXPECT_TRUE(Near(m(l, j), j <= l ? binomial(l, j) : Real(0), 240)) << l << "," << j;
}

TEST(Faces, ActionOnMonomials) {
    DiffOperator op = x_plus_d();
    Matrix m = moment_face(op, 5, 6);
    for (int i = 0; i < 5; ++i) {
        Polynomial img = op(Polynomial::monomial(i));
        for (int j = 0; j < 6; ++j) EXPECT_TRUE(Near(m(i, j), img[j], 240)) << i << "," << j;
    }
}

TEST(Deform, MomentsMatchMeasureSide) {
    MeasureMatrix w = suites::fx::sobolev_unit();
    Matrix viaMoments = deform_moments(x_plus_d(), w, one_minus_d(), 8);
    Matrix viaMeasure = assemble_moment_matrix(deform_measure(x_plus_d(), w, one_minus_d()), 8);
    EXPECT_LE(rel_diff(viaMoments, viaMeasure), kBound);
    // and both equal (L1 f, L2 h; W) on monomials
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Real want = bilinear(x_plus_d()(Polynomial::monomial(i)), one_minus_d()(Polynomial::monomial(j)), w);
            EXPECT_TRUE(Near(viaMoments(i, j), want, 200)) << i << "," << j;
        }
}

TEST(Opdo, MeasureMatrixOfOperatorPair) {
    OpdoMeasure m = opdo_measure_matrix(x_plus_d(), one_minus_d(), hermite());
    EXPECT_LE(m.residual, kBound);
    EXPECT_EQ(m.w.order(), 1);
}

TEST(LowerLink, OneMinusDOnHermite) {
    LowerLink l = invertible_lower_link(one_minus_d(), hermite(), 8);
    EXPECT_LE(l.agreement, kBound);
    // (I - D) 1 = 1, so h_0 is the Hermite mass
    EXPECT_TRUE(Near(l.direct.h[0], sqrt(boost::math::constants::pi<Real>()), 230));
    EXPECT_THROW(invertible_lower_link(DiffOperator::multiply(Polynomial{Real(0), Real(0), Real(1)}), hermite(), 4),
                 NotInvertible);
    EXPECT_THROW(invertible_lower_link(DiffOperator::derivative(1), hermite(), 4), NotInvertible);
}

TEST(GeneralizedDiagonal, PolynomialFactorization) {
    // F = [[1, x], [x, 1 + x^2]] = L diag(1, 1) U with u_01 = x
    MeasureMatrix w(1);
    w(0, 0) = hermite();
    w(0, 1) = Measure::continuous(PearsonFamily::hermite(), Polynomial::x());
    w(1, 0) = w(0, 1);
    w(1, 1) = Measure::continuous(PearsonFamily::hermite(), Polynomial{Real(1), Real(0), Real(1)});
    GeneralizedDiagonal g = generalized_diagonal(w);
    EXPECT_LE(g.residual, kBound);
    EXPECT_TRUE(PolyNear(g.U(0, 1), Polynomial::x(), 230));
    EXPECT_TRUE(PolyNear(g.d[1], Polynomial(1), 230));
    EXPECT_TRUE(g.degree_condition == false);  // j - deg u_01 = 0 is not > 0
}

TEST(GeneralizedDiagonal, RationalFactorRejected) {
    MeasureMatrix w(1);
    w(0, 0) = Measure::continuous(PearsonFamily::hermite(), Polynomial{Real(1), Real(0), Real(1)});
    w(0, 1) = hermite();
    w(1, 0) = hermite();
    w(1, 1) = Measure::continuous(PearsonFamily::hermite(), Polynomial(2));
    EXPECT_THROW(generalized_diagonal(w), NonPolynomialFactor);
    MeasureMatrix mixed(1);
    mixed(0, 0) = hermite();
    mixed(1, 1) = Measure::continuous(PearsonFamily::laguerre(0));
    EXPECT_THROW(generalized_diagonal(mixed), DomainError);
}
