#include "common.hpp"

#include "sobolev/toda.hpp"
#include "suites.hpp"

using namespace sob;
using testing_support::Near;
using testing_support::q;

namespace {
MeasureMatrix hermite() { return MeasureMatrix::scalar(Measure::continuous(PearsonFamily::hermite())); }
TimePoint mixed_time() {
    TimePoint t;
    t.t1[1] = q(3, 5);
    t.t2[1] = q(-1, 5);
    return t;
}
}  // namespace

TEST(Evolve, HermiteFirstFlowShiftsTheMean) {
    // e^{-x^2 + t x} is a Gaussian centred at t/2: monic recurrence diagonal t/2
    TimePoint t;
    t.t1[1] = q(3, 5);
    TodaState s = evolve(hermite(), t, 8);
    for (int i = 0; i + 1 < 8; ++i) EXPECT_TRUE(Near(s.lax1(i, i), q(3, 10), 100)) << i;
    EXPECT_TRUE(s.lax1_hessenberg);
    EXPECT_TRUE(s.lax2_hessenberg);
}

TEST(Evolve, SobolevLaxMatricesAreHessenberg) {
    TodaState s = evolve(suites::fx::sobolev_hermite(), mixed_time(), 8);
    EXPECT_TRUE(s.lax1_hessenberg);
    EXPECT_TRUE(s.lax2_hessenberg);
}

TEST(Lax, HermiteResidualVanishes) {
    Real h = q(1, 1000);
    EXPECT_LE(lax_residual(hermite(), mixed_time(), 1, 1, h, 8), pow2(-100));
    EXPECT_LE(lax_residual(hermite(), mixed_time(), 2, 1, h, 8), pow2(-100));
}

TEST(Lax, SobolevResidualIsSecondOrder) {
    MeasureMatrix w = suites::fx::sobolev_hermite();
    Real h1 = q(1, 1000), h2 = q(1, 2000);
    for (auto [a, j] : {std::pair{1, 1}, std::pair{2, 1}, std::pair{1, 2}}) {
        Real ratio = lax_residual(w, mixed_time(), a, j, h1, 8) / lax_residual(w, mixed_time(), a, j, h2, 8);
        EXPECT_GE(ratio, 3.5) << a << "," << j;
        EXPECT_LE(ratio, 4.5) << a << "," << j;
    }
    EXPECT_THROW(lax_residual(w, mixed_time(), 3, 1, h1, 8), ParameterOutOfRange);
    EXPECT_THROW(lax_residual(w, mixed_time(), 1, 0, h1, 8), ParameterOutOfRange);
}

TEST(ZeroCurvature, SecondOrderInStep) {
    MeasureMatrix w = suites::fx::sobolev_hermite();
    Real h1 = q(1, 1000), h2 = q(1, 2000);
    Real ratio = zakharov_shabat_residual(w, mixed_time(), {1, 1}, {2, 1}, h1, 8) /
                 zakharov_shabat_residual(w, mixed_time(), {1, 1}, {2, 1}, h2, 8);
    EXPECT_GE(ratio, 3.5);
    EXPECT_LE(ratio, 4.5);
}

TEST(Wave, FactorizedIdentities) {
    MeasureMatrix w = suites::fx::sobolev_hermite();
    EXPECT_LE(wave_identity_residual(w, mixed_time(), 8), pow2(-120));
    TimePoint tp;
    tp.t1[1] = q(1, 4);
    tp.t1[2] = q(-1, 10);
    tp.t2[1] = q(1, 3);
    EXPECT_LE(wave_relation_residual(w, mixed_time(), tp, 8), pow2(-120));
}

TEST(Wave, DeformedMomentsBothSides) {
    TimePoint t = mixed_time();
    t.t2[2] = q(-1, 8);
    DeformedMoments d = deformed_moment_matrix(suites::fx::sobolev_hermite(), t, 8);
    EXPECT_LE(d.agreement, pow2(-120));
}

TEST(Time, ZeroIndexRejected) {
    TimePoint t;
    t.t1[0] = Real(1);
    EXPECT_THROW(t.validate(), ParameterOutOfRange);
    TimePoint ok = mixed_time();
    EXPECT_NO_THROW(ok.validate());
    EXPECT_EQ(ok.max_flow(), 1);
}
