#include "common.hpp"

using namespace sob;
using testing_support::Near;
using testing_support::PolyNear;
using testing_support::q;

namespace {
Real pi() { return boost::math::constants::pi<Real>(); }
}

TEST(Moments, HermiteGammaHalfIntegers) {
    auto mu = raw_moments(Measure::continuous(PearsonFamily::hermite()), 12);
    for (int n = 0; n < 12; ++n) {
        Real want = (n % 2) ? Real(0) : boost::multiprecision::tgamma(Real(n + 1) / 2);
        EXPECT_TRUE(Near(mu[n], want, 240)) << n;
    }
}

TEST(Moments, LaguerreFactorials) {
    auto mu = raw_moments(Measure::continuous(PearsonFamily::laguerre(0)), 10);
    Real f = 1;
    for (int n = 0; n < 10; ++n) {
        if (n > 0) f *= n;
        EXPECT_TRUE(Near(mu[n], f, 240)) << n;
    }
    // α = 1/2: Γ(n + 3/2) = (n + 1/2) Γ(n + 1/2)
    auto h = raw_moments(Measure::continuous(PearsonFamily::laguerre(q(1, 2))), 6);
    Real g = sqrt(pi()) / 2;
    for (int n = 0; n < 6; ++n) {
        EXPECT_TRUE(Near(h[n], g, 240)) << n;
        g *= Real(n) + q(3, 2);
    }
}

TEST(Moments, JacobiHalfParametersViaCosineSubstitution) {
    // x = cos θ turns sqrt((1-x)/(1+x)) dx into (1 - cos θ) dθ on [0, π]
    auto mu = raw_moments(Measure::continuous(PearsonFamily::jacobi(q(1, 2), q(-1, 2))), 4);
    EXPECT_TRUE(Near(mu[0], pi(), 240));
    EXPECT_TRUE(Near(mu[1], -pi() / 2, 240));
    EXPECT_TRUE(Near(mu[2], pi() / 2, 240));
    EXPECT_TRUE(Near(mu[3], -3 * pi() / 8, 240));
}

TEST(Moments, UniformWithFactorAndAtoms) {
    Measure m = Measure::continuous(PearsonFamily::uniform(0, 1), Polynomial{Real(1), Real(1)});
    m += Measure::point(Real(2), q(1, 3));
    auto mu = raw_moments(m, 8);
    for (int n = 0; n < 8; ++n) {
        Real want = Real(1) / (n + 1) + Real(1) / (n + 2) + pow(Real(2), n) / 3;
        EXPECT_TRUE(Near(mu[n], want, 240)) << n;
    }
}

TEST(Moments, TiltedHermite) {
    Real s = q(3, 5);
    Measure m = Measure::continuous(PearsonFamily::hermite()).tilted(Polynomial{Real(0), s});
    auto mu = raw_moments(m, 3);
    Real m0 = sqrt(pi()) * exp(s * s / 4);
    EXPECT_TRUE(Near(mu[0], m0, 230));
    EXPECT_TRUE(Near(mu[1], s / 2 * m0, 230));
    EXPECT_TRUE(Near(mu[2], (Real(1) / 2 + s * s / 4) * m0, 230));
}

TEST(Quadrature, GaussLegendreIsExactToDegree2nMinus1) {
    auto rule = gauss_jacobi(0, 0, 12);
    for (int d = 0; d < 24; ++d) {
        Real s = 0;
        for (std::size_t i = 0; i < rule->nodes.size(); ++i) s += rule->weights[i] * pow(rule->nodes[i], d);
        Real want = (d % 2) ? Real(0) : Real(2) / (d + 1);
        EXPECT_TRUE(Near(s, want, 220)) << d;
    }
}

TEST(Quadrature, IntegrateSmoothFunctionOnInterval) {
    Measure m = Measure::continuous(PearsonFamily::uniform(0, 1));
    auto v = integrate(m, 1, [](const Real& x, std::vector<Real>& out) { out[0] = 1 / (2 - x); });
    EXPECT_TRUE(Near(v[0], log(Real(2)), 200));
}

TEST(Pearson, PhiPolynomialsClosedForms) {
    // d²/dx² e^{-x²} = (4x² - 2) e^{-x²}
    EXPECT_TRUE(PolyNear(phi_polynomial(PearsonFamily::hermite(), 2, 2), Polynomial{Real(-2), Real(0), Real(4)}, 240));
    // d/dx (x e^{-x}) = (1 - x) e^{-x}
    EXPECT_TRUE(PolyNear(phi_polynomial(PearsonFamily::laguerre(0), 1, 1), Polynomial{Real(1), Real(-1)}, 240));
    // d/dx (1 - x²) = -2x for Legendre
    EXPECT_TRUE(PolyNear(phi_polynomial(PearsonFamily::jacobi(0, 0), 1, 1), Polynomial{Real(0), Real(-2)}, 240));
}

TEST(Pearson, ShiftedClassicalCarriesP2) {
    auto a = raw_moments(shifted_classical(PearsonFamily::laguerre(0), 1), 5);
    auto b = raw_moments(Measure::continuous(PearsonFamily::laguerre(1)), 5);
    for (int n = 0; n < 5; ++n) EXPECT_TRUE(Near(a[n], b[n], 240));
}

TEST(Families, ParameterChecks) {
    EXPECT_THROW(PearsonFamily::laguerre(-1), ParameterOutOfRange);
    EXPECT_THROW(PearsonFamily::jacobi(-2, 0), ParameterOutOfRange);
    EXPECT_THROW(PearsonFamily::uniform(1, 0), ParameterOutOfRange);
    EXPECT_THROW(PearsonFamily::uniform(0, 1).p2(), NotClassical);
}

TEST(Families, UnboundedIntegrationRejected) {
    Measure h = Measure::continuous(PearsonFamily::hermite());
    EXPECT_THROW(integrate(h, 1, [](const Real&, std::vector<Real>& o) { o[0] = 1; }), DomainError);
}
