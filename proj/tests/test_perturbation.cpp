#include "common.hpp"

#include "sobolev/perturbation.hpp"
#include "suites.hpp"

using namespace sob;
using testing_support::Near;
using testing_support::PolyNear;
using testing_support::q;

TEST(Additive, FormulaMatchesRefactorization) {
    MeasureMatrix base = MeasureMatrix::scalar(suites::fx::legendre());
    MeasureMatrix extra(1);
    extra(0, 1) = Measure::point(q(1, 3), q(1, 2));
    extra(1, 1) = Measure::point(q(-1, 2), Real(1));
    int k = 9;
    Matrix g0 = assemble_moment_matrix(base, k), g = assemble_moment_matrix(extra, k);
    AdditiveResult r = additive_perturb(g0, g);
    EXPECT_LE(r.agreement, pow2(-150));
    // A = S1 g S2^T is the perturbation seen in the old basis
    SBPS s = sbps(g0);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            EXPECT_TRUE(Near(r.data.A(i, j), bilinear(s.p1[i], s.p2[j], extra), 200)) << i << "," << j;
    for (int n = 0; n < k; ++n) EXPECT_TRUE(Near(r.data.h[n], r.direct.h[n], 180));
}

TEST(ClassicalPair, PolynomialsUnchangedNormsShifted) {
    for (auto& fam : suites::fx::classical_families())
        for (Real lambda : {q(1, 4), Real(1), Real(4)}) {
            ClassicalPairResult r = classical_pair(fam, lambda, 9);
            EXPECT_LE(r.poly_distance, pow2(-150)) << suites::fx::family_name(fam);
            EXPECT_LE(r.norm_distance, pow2(-150)) << suites::fx::family_name(fam);
        }
    // Legendre, λ = 1: u_{γ+1} = 1 - x^2, so h_1 = 2/3 + 4/3
    ClassicalPairResult r = classical_pair(PearsonFamily::jacobi(0, 0), Real(1), 3);
    EXPECT_TRUE(Near(r.sobolev.h[1], Real(2), 200));
    EXPECT_THROW(classical_pair(PearsonFamily::uniform(0, 2), Real(1), 3), NotClassical);
    EXPECT_THROW(classical_pair(PearsonFamily::hermite(), Real(-1), 3), ParameterOutOfRange);
}

TEST(Coherent, LaguerrePairFormulaMatchesDirect) {
    // monic Laguerre: L^α_n = P'_{n+1}/(n+1) + P'_n, so r_n = -n
    Measure lag = Measure::continuous(PearsonFamily::laguerre(1));
    int k = 9;
    std::vector<Real> r;
    for (int n = 1; n <= k; ++n) r.push_back(Real(-n));
    CoherencePair cp = CoherencePair::standard(lag, lag, r);
    for (Real lambda : {q(1, 3), Real(2)}) {
        CoherentResult c = coherent_pair_sbps(cp, lambda, k);
        EXPECT_LE(c.coherence, pow2(-150));
        EXPECT_LE(c.agreement, pow2(-140));
    }
    std::vector<Real> wrong;
    for (int n = 1; n <= k; ++n) wrong.push_back(Real(n));
    EXPECT_THROW(coherent_pair_sbps(CoherencePair::standard(lag, lag, wrong), Real(1), k), CoherenceViolation);
    EXPECT_THROW(coherent_pair_sbps(cp, Real(0), k), ParameterOutOfRange);
}

TEST(Discrete, LaguerreWithMassAtOrigin) {
    Measure lag = Measure::continuous(PearsonFamily::laguerre(0));
    DiscreteSpec one{{{Real(0), 1, 1}}, {Matrix::diag({Real(1)})}};
    DiscreteResult d = discrete_sobolev(MeasureMatrix::scalar(lag), one, 8);
    EXPECT_TRUE(PolyNear(d.direct.p1[1], Polynomial{q(-1, 2), Real(1)}, 230));
    EXPECT_TRUE(PolyNear(d.expanded.p1[1], Polynomial{q(-1, 2), Real(1)}, 200));
    EXPECT_TRUE(PolyNear(d.bordered.p2[1], Polynomial{q(-1, 2), Real(1)}, 200));
    EXPECT_LE(d.agreement, pow2(-140));
}

TEST(Discrete, NonSymmetricBlocksAndValidation) {
    Measure her = Measure::continuous(PearsonFamily::hermite());
    Matrix xi(2, 1);
    xi(0, 0) = q(3, 4);
    xi(1, 0) = q(-1, 4);
    DiscreteSpec s{{{q(1, 2), 2, 1}, {Real(-1), 1, 1}}, {xi, Matrix::diag({q(1, 3)})}};
    DiscreteResult d = discrete_sobolev(MeasureMatrix::scalar(her), s, 8);
    EXPECT_LE(d.agreement, pow2(-130));
    // the perturbation is the measure-matrix bilinear form of the atoms
    Matrix g = discrete_moment_perturbation(s, 4);
    MeasureMatrix w = s.as_measure_matrix();
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            EXPECT_TRUE(Near(g(i, j), bilinear(Polynomial::monomial(i), Polynomial::monomial(j), w), 230));
    DiscreteSpec bad{{{Real(0), 2, 1}}, {Matrix::diag({Real(1)})}};
    EXPECT_THROW(discrete_sobolev(MeasureMatrix::scalar(her), bad, 4), ParameterOutOfRange);
    DiscreteSpec dup{{{Real(0), 1, 1}, {Real(0), 1, 1}}, {Matrix::diag({Real(1)}), Matrix::diag({Real(1)})}};
    EXPECT_THROW(discrete_sobolev(MeasureMatrix::scalar(her), dup, 4), ParameterOutOfRange);
}

TEST(WRecurrence, BandedByDegreeOfW) {
    Measure lag = Measure::continuous(PearsonFamily::laguerre(0));
    Matrix xi = Matrix::diag({Real(1), q(1, 2)});
    DiscreteSpec s{{{Real(0), 2, 2}}, {xi}};
    WRecurrence r = w_recurrence(lag, s, 12);
    int d = r.W.degree();
    EXPECT_EQ(d, 2);
    EXPECT_TRUE(satisfies(r.R1.lead(r.interior), BandProfile{d, d}, pow2(-120)));
    EXPECT_TRUE(satisfies(r.R2.lead(r.interior), BandProfile{d, d}, pow2(-120)));
    EXPECT_FALSE(satisfies(r.R1.lead(r.interior), BandProfile{d - 1, d - 1}, pow2(-120)));
    EXPECT_LE(r.duality, pow2(-120));
}
