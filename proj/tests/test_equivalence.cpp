#include "common.hpp"

#include "sobolev/equivalence.hpp"
#include "suites.hpp"

using namespace sob;
using testing_support::Near;
using testing_support::q;

namespace {
const Real kBound = pow2(-120);
}

TEST(Moves, IntegrationByPartsPicksUpBoundaryAtoms) {
    // (f, h') with dx on [0,1] equals f(1)h(1) - f(0)h(0) - (f', h)
    MeasureMatrix w(1);
    w(0, 1) = suites::fx::unit_uniform();
    ElementaryMove mv{0, 1, MoveKind::ShiftLeftColumn, {}};
    MeasureMatrix out = apply_move(w, mv);
    EXPECT_LE(moment_mismatch(w, out, 8), kBound);
    ASSERT_EQ(mv.boundary.atoms.size(), 2u);
    Real total = 0;
    for (auto& a : mv.boundary.atoms) total += abs(a.mass);
    EXPECT_TRUE(Near(total, 2, 200));
}

TEST(Moves, VanishingDensityLeavesNoBoundary) {
    MeasureMatrix w = suites::move_fixtures()[0].second;
    ElementaryMove mv{1, 0, MoveKind::ShiftUpRow, {}};
    MeasureMatrix out = apply_move(w, mv);
    EXPECT_LE(moment_mismatch(w, out, 10), kBound);
    for (auto& a : mv.boundary.atoms) EXPECT_LE(abs(a.mass), kBound);
}

TEST(Moves, EveryFixturePreservesMoments) {
    for (auto& [name, w] : suites::move_fixtures())
        for (int i = 0; i < w.dim(); ++i)
            for (int j = 0; j < w.dim(); ++j) {
                if (continuous_part(w(i, j)).is_zero()) continue;
                for (MoveKind kind : {MoveKind::ShiftUpRow, MoveKind::ShiftLeftColumn, MoveKind::AntiderivativeSpread}) {
                    if ((kind == MoveKind::ShiftUpRow && i < 1) || (kind == MoveKind::ShiftLeftColumn && j < 1)) continue;
                    ElementaryMove mv{i, j, kind, {}};
                    try {
                        MeasureMatrix out = apply_move_unchecked(w, mv);
                        EXPECT_LE(moment_mismatch(w, out, 8), kBound) << name << " (" << i << "," << j << ")";
                    } catch (const NotClosedUnderMove&) {
                    }
                }
            }
}

TEST(Moves, OutOfRangeTarget) {
    MeasureMatrix w = suites::move_fixtures()[0].second;
    ElementaryMove mv{2, 0, MoveKind::ShiftUpRow, {}};
    EXPECT_THROW(apply_move_unchecked(w, mv), ParameterOutOfRange);
}

TEST(Reduction, SymmetricPairBecomesScalar) {
    // (f, h) + (f, h'; 1-x^2) + (f', h; 1-x^2) on [-1,1]: (x, 1) = ∫ x + ∫ (1 - x^2) = 4/3
    MeasureMatrix w = suites::move_fixtures()[0].second;
    Polynomial x = Polynomial::x(), one(1);
    EXPECT_TRUE(Near(bilinear(x, one, w), q(4, 3), 220));
    DiagonalReduction red = reduce_to_diagonal(w);
    MeasureMatrix scalar = (red.diagonal + red.discrete).trimmed();
    EXPECT_EQ(scalar.order(), 0);
    EXPECT_TRUE(Near(bilinear(x, one, scalar), q(4, 3), 200));
    EXPECT_LE(moment_mismatch(w, scalar, 10), kBound);
    EXPECT_FALSE(red.trace.empty());
}

TEST(Reduction, SymmetricLaguerreAndNonSymmetricRejected) {
    MeasureMatrix w = suites::move_fixtures()[4].second;
    w(1, 0) = w(0, 1);
    DiagonalReduction red = reduce_to_diagonal(w);
    EXPECT_LE(moment_mismatch(w, red.diagonal + red.discrete, 8), kBound);
    for (int i = 0; i < red.diagonal.dim(); ++i)
        for (int j = 0; j < red.diagonal.dim(); ++j)
            if (i != j) EXPECT_TRUE(red.diagonal(i, j).is_zero()) << i << "," << j;
    EXPECT_THROW(reduce_to_diagonal(suites::move_fixtures()[1].second), ParameterOutOfRange);
}

TEST(TildeOmega, BoundaryVanishingOrders) {
    auto jac = [](const Polynomial& p) { return Measure::continuous(PearsonFamily::jacobi(0, 0), p); };
    Polynomial s{Real(1), Real(0), Real(-1)};
    EXPECT_TRUE(tilde_omega_check(jac(s * s), 2));
    EXPECT_TRUE(tilde_omega_check(jac(s), 1));
    EXPECT_FALSE(tilde_omega_check(jac(s), 2));
    EXPECT_FALSE(tilde_omega_check(jac(Polynomial(1)), 1));
    EXPECT_TRUE(tilde_omega_check(Measure::continuous(PearsonFamily::hermite()), 4));
    EXPECT_TRUE(tilde_omega_check(Measure::continuous(PearsonFamily::laguerre(2)), 2));
    EXPECT_FALSE(tilde_omega_check(Measure::continuous(PearsonFamily::laguerre(0)), 1));
}

TEST(OperatorF, SymmetricAndTriangular) {
    for (auto& fam : {PearsonFamily::laguerre(0), PearsonFamily::jacobi(0, 0), PearsonFamily::hermite()}) {
        std::vector<Polynomial> v{Polynomial(1), Polynomial{Real(2), Real(1)}};
        OperatorF f = build_operator_F(fam, v, 8);
        std::string tag = suites::fx::family_name(fam);
        EXPECT_LE(f.g_residual, kBound) << tag;
        EXPECT_LE(f.sym_residual, kBound) << tag;
        EXPECT_LE(f.fg_residual, kBound) << tag;
        EXPECT_LE(f.u_lower, kBound) << tag;
        EXPECT_LE(f.j_duality, kBound) << tag;
        EXPECT_EQ(f.u_band.lower, 0) << tag;
    }
    EXPECT_THROW(build_operator_F(PearsonFamily::uniform(0, 2), {Polynomial(1)}, 4), NotClassical);
    EXPECT_THROW(build_operator_F(PearsonFamily::hermite(), {}, 4), ParameterOutOfRange);
}
