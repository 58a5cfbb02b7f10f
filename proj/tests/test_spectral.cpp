#include "common.hpp"

#include "sobolev/spectral.hpp"
#include "suites.hpp"

using namespace sob;
using testing_support::Near;
using testing_support::PolyNear;
using testing_support::q;

namespace {
const Real kBound = pow2(-120);
MeasureMatrix legendre() { return MeasureMatrix::scalar(suites::fx::legendre()); }
}  // namespace

TEST(Christoffel, LegendreTimesLinearFactor) {
    // (x - 2) dx on [-1,1]: m0 = -4, m1 = 2/3, so P̂_1 = x + 1/6
    Transformed t = christoffel(legendre(), GermSet{{{Real(2), 1}}}, Side::Left, 5);
    EXPECT_TRUE(PolyNear(t.direct.p1[1], Polynomial{q(1, 6), Real(1)}, 230));
    EXPECT_TRUE(PolyNear(t.formula.p1[1], Polynomial{q(1, 6), Real(1)}, 200));
    EXPECT_TRUE(Near(t.direct.h[0], -4, 230));
    EXPECT_LE(t.agreement, kBound);
    EXPECT_EQ(t.M, 1);
    EXPECT_EQ(t.N, 0);
}

TEST(Christoffel, BothSidesOnNonSymmetricMatrix) {
    MeasureMatrix w = suites::fx::sobolev_unit();
    for (Side side : {Side::Left, Side::Right}) {
        Transformed t = christoffel(w, suites::christoffel_roots(), side, 8);
        EXPECT_LE(t.agreement, kBound);
        EXPECT_LE(t.duality, kBound);
        EXPECT_LE(t.moment_identity, kBound);
    }
    // formula from the SBPS alone matches the measure-side transform
    SBPS base = sbps(w, 8 + 3);
    SBPS f = christoffel_formula(base, suites::christoffel_roots(), Side::Left, 8);
    EXPECT_LE(sbps_distance(f, christoffel(w, suites::christoffel_roots(), Side::Left, 8).direct), kBound);
}

TEST(Geronimus, DualPathsAndMomentIdentity) {
    MeasureMatrix w = suites::fx::sobolev_unit();
    for (Side side : {Side::Left, Side::Right})
        for (auto& g : {suites::geronimus_plain(), suites::geronimus_with_masses()}) {
            Transformed t = geronimus(w, g, side, 8);
            EXPECT_LE(t.agreement, kBound);
            EXPECT_LE(t.duality, kBound);
            EXPECT_LE(t.moment_identity, kBound);
            EXPECT_EQ(t.N, 3);
        }
}

TEST(Geronimus, UniformBySimplePole) {
    // dx / (x - 2) on [0,1] has mass -ln 2
    Transformed t = geronimus(MeasureMatrix::scalar(suites::fx::unit_uniform()), GeronimusSpec{GermSet{{{Real(2), 1}}}, {}},
                              Side::Right, 4);
    EXPECT_TRUE(Near(t.direct.h[0], -log(Real(2)), 200));
    EXPECT_LE(t.agreement, kBound);
}

TEST(Spectral, BothOrientations) {
    MeasureMatrix w = suites::fx::sobolev_unit();
    for (Orientation o : {Orientation::RL, Orientation::LR}) {
        Transformed t = spectral(w, suites::christoffel_roots(), suites::geronimus_with_masses(), o, 8);
        EXPECT_LE(t.agreement, kBound);
        EXPECT_LE(t.duality, kBound);
        EXPECT_LE(t.moment_identity, kBound);
        EXPECT_TRUE(satisfies(t.resolvent.data, t.resolvent.profile, kBound));
        EXPECT_LE(t.resolvent.corner_defect, kBound);
    }
}

TEST(Spectral, SharedRootAndInteriorPointRejected) {
    MeasureMatrix w = suites::fx::sobolev_unit();
    GeronimusSpec g{GermSet{{{Real(2), 1}}}, {}};
    EXPECT_THROW(spectral(w, GermSet{{{Real(2), 1}}}, g, Orientation::RL, 4), NotCoprime);
    EXPECT_THROW(geronimus(w, GeronimusSpec{GermSet{{{q(1, 2), 1}}}, {}}, Side::Right, 4), DomainError);
    EXPECT_THROW(geronimus(w, GeronimusSpec{GermSet{{{Real(2), 1}}}, {Matrix(2, 2)}}, Side::Right, 4), ParameterOutOfRange);
    EXPECT_THROW(christoffel(w, GermSet{{{Real(2), 0}}}, Side::Left, 4), ParameterOutOfRange);
}

TEST(Germs, SecondKindTaylorData) {
    MeasureMatrix w = MeasureMatrix::scalar(suites::fx::unit_uniform());
    SBPS s = sbps(w, 2);
    // C(y) = ∫_0^1 dx/(y-x): C(2) = ln 2, C'(2) = -∫ dx/(2-x)^2 = -1/2
    Matrix m = second_kind_germ_matrix(w, s.p1, 1, GermSet{{{Real(2), 2}}}, 1);
    EXPECT_TRUE(Near(m(0, 0), log(Real(2)), 200));
    EXPECT_TRUE(Near(m(0, 1), q(-1, 2), 200));
    EXPECT_THROW(second_kind_germ_matrix(w, s.p1, 1, GermSet{{{q(1, 2), 1}}}, 1), DomainError);
}

TEST(Germs, QMatrixDividedDifference) {
    Polynomial p{Real(3), Real(-1), q(1, 2), Real(2)};
    Matrix m = q_matrix(p, 4);
    Real x = q(1, 3), y = q(-5, 4);
    Real lhs = 0;
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) lhs += pow(x, i) * m(i, j) * pow(y, j);
    EXPECT_TRUE(Near(lhs, (p(x) - p(y)) / (x - y), 230));
}

TEST(Kernels, ChristoffelAndSpectralLinks) {
    Real x = q(2, 5), y = q(-1, 3);
    EXPECT_LE(christoffel_kernel_link(legendre(), GermSet{{{Real(2), 1}, {Real(-3), 1}}}, 6, x, y), kBound);
    EXPECT_LE(christoffel_kernel_link(suites::fx::sobolev_unit(), suites::christoffel_roots(), 6, x, y), kBound);
    GeronimusSpec g = suites::geronimus_with_masses();
    Transformed t = spectral(suites::fx::sobolev_unit(), suites::christoffel_roots(), g, Orientation::RL, 10);
    EXPECT_LE(spectral_kernel_link(t, suites::christoffel_roots().polynomial(), g.germ.polynomial(), 5, x, y), kBound);
    EXPECT_THROW(upsilon(t, 2), ParameterOutOfRange);
}

TEST(QuasiRecurrence, BandedAndDual) {
    std::vector<Real> xs{q(-1, 2), q(1, 3), Real(2)};
    QuasiRecurrence c = christoffel_quasi_recurrence(suites::fx::sobolev_unit(), suites::christoffel_roots(), 8, xs);
    EXPECT_TRUE(c.band_ok);
    EXPECT_EQ(c.expected_half, 3);
    EXPECT_LE(c.h_link, kBound);
    EXPECT_LE(c.eigen_residual, kBound);
    QuasiRecurrence g = geronimus_quasi_recurrence(suites::fx::sobolev_unit(), suites::geronimus_with_masses(), 8, xs);
    EXPECT_TRUE(g.band_ok);
    EXPECT_LE(g.h_link, kBound);
    EXPECT_LE(g.eigen_residual, kBound);
}
