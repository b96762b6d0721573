#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "tmp3/errors.hpp"
#include "tmp3/poly.hpp"

using namespace tmp3;

namespace {

UnivarPoly U(std::vector<double> c) { return UnivarPoly(std::move(c)); }

}  // namespace

TEST(BivarPoly, ZeroCoefficientsAreNotStored) {
    BivarPoly p = BivarPoly::monomial(2, 1, 3.0);
    p.add_term(2, 1, -3.0);
    EXPECT_TRUE(p.is_zero());
    EXPECT_EQ(p.degree(), -1);
    p.set_term(0, 3, 0.0);
    EXPECT_EQ(p.size(), 0u);
}

TEST(BivarPoly, ArithmeticAndEvaluation) {
    const BivarPoly x = BivarPoly::x(), y = BivarPoly::y();
    const BivarPoly p = (x + y) * (x - y);  // x^2 - y^2
    EXPECT_EQ(p.coeff(2, 0), 1.0);
    EXPECT_EQ(p.coeff(0, 2), -1.0);
    EXPECT_EQ(p.coeff(1, 1), 0.0);
    EXPECT_EQ(p.size(), 2u);
    EXPECT_EQ(p.degree(), 2);
    EXPECT_DOUBLE_EQ(p.eval(3.0, 2.0), 5.0);
    EXPECT_EQ((x + y).pow(3).coeff(1, 2), 3.0);
    EXPECT_DOUBLE_EQ((2.0 * x - 5.0 * y).max_abs_coeff(), 5.0);
    EXPECT_DOUBLE_EQ((2.0 * x - 5.0 * y).l1_norm(), 7.0);
}

TEST(BivarPoly, PrunedDropsRelativelySmallTerms) {
    BivarPoly p = BivarPoly::monomial(1, 0, 1.0) + BivarPoly::monomial(0, 1, 1e-14);
    const BivarPoly q = p.pruned(1e-12);
    EXPECT_EQ(q.size(), 1u);
    EXPECT_EQ(q.coeff(1, 0), 1.0);
}

TEST(UnivarPoly, TrailingZerosTrimmed) {
    const UnivarPoly p = U({1.0, 2.0, 0.0, 0.0});
    EXPECT_EQ(p.degree(), 1);
    EXPECT_TRUE(U({0.0, 0.0}).is_zero());
}

TEST(UnivarPoly, DivmodReconstructs) {
    const UnivarPoly a = U({-6.0, 11.0, -6.0, 1.0});
    const UnivarPoly b = U({-1.0, 1.0});
    const auto [q, r] = a.divmod(b);
    EXPECT_TRUE(r.is_zero() || r.norm_inf() < 1e-14);
    const UnivarPoly back = q * b + r;
    for (int n = 0; n <= 3; ++n) EXPECT_NEAR(back.coeff(n), a.coeff(n), 1e-14);
}

TEST(UnivarPoly, FromRootsAndDerivative) {
    const UnivarPoly p = UnivarPoly::from_roots({1.0, 2.0});
    EXPECT_DOUBLE_EQ(p.coeff(0), 2.0);
    EXPECT_DOUBLE_EQ(p.coeff(1), -3.0);
    EXPECT_DOUBLE_EQ(p.coeff(2), 1.0);
    const UnivarPoly d = p.derivative();
    EXPECT_DOUBLE_EQ(d.coeff(0), -3.0);
    EXPECT_DOUBLE_EQ(d.coeff(1), 2.0);
}

TEST(Compose, SubstitutesParametrization) {
    // y^2 - x^3 along (t^2, t^3) vanishes identically.
    const BivarPoly neile = BivarPoly::monomial(0, 2) - BivarPoly::monomial(3, 0);
    const UnivarPoly c = compose(neile, U({0, 0, 1}), U({0, 0, 0, 1}));
    EXPECT_TRUE(c.is_zero() || c.norm_inf() < 1e-15);
}

TEST(RationalElem, EvaluatesAndReportsPoles) {
    const RationalElem e(BivarPoly::y(), BivarPoly::x());
    EXPECT_FALSE(e.is_polynomial());
    EXPECT_DOUBLE_EQ(e.eval(4.0, 8.0), 2.0);
    EXPECT_THROW(e.eval(0.0, 1.0), PoleError);
    EXPECT_TRUE(RationalElem(BivarPoly::x()).is_polynomial());
}

TEST(CubicRealRoots, FactoredCubic) {
    const auto r = cubic_real_roots(U({-6.0, 11.0, -6.0, 1.0}));
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[0], 1.0, 1e-12);
    EXPECT_NEAR(r[1], 2.0, 1e-12);
    EXPECT_NEAR(r[2], 3.0, 1e-12);
}

TEST(CubicRealRoots, FirstNumericExampleCubic) {
    const auto r = cubic_real_roots(U({62494.0, -10014.0, 2.0, 1.0}));
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[0], -104.033, 1e-2);
    EXPECT_NEAR(r[1], 6.273, 1e-2);
    EXPECT_NEAR(r[2], 95.76, 1e-2);
}

TEST(CubicRealRoots, SecondNumericExampleCubic) {
    const auto r = cubic_real_roots(U({97.0 / 4.0, -19.0, -2.0, 1.0}));
    ASSERT_EQ(r.size(), 3u);
    EXPECT_NEAR(r[0], -4.091, 1e-2);
    EXPECT_NEAR(r[1], 1.22, 1e-2);
    EXPECT_NEAR(r[2], 4.88, 1e-2);
}

TEST(CubicRealRoots, ZeroPolynomialIsDegenerate) {
    EXPECT_THROW(cubic_real_roots(UnivarPoly()), DegenerateInput);
}

TEST(CubicRealRoots, LowerDegreesAndComplexPairs) {
    EXPECT_EQ(cubic_real_roots(U({-2.0, 1.0})), std::vector<double>{2.0});
    EXPECT_TRUE(cubic_real_roots(U({1.0, 0.0, 1.0})).empty());
    const auto r = cubic_real_roots(U({1.0, 0.0, 0.0, 1.0}));  // t^3 + 1
    ASSERT_EQ(r.size(), 1u);
    EXPECT_NEAR(r[0], -1.0, 1e-12);
}

TEST(CubicRealRoots, RandomCubicsResubstituteAndAscend) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> coef(-10.0, 10.0);
    for (int trial = 0; trial < 200; ++trial) {
        const UnivarPoly q = U({coef(rng), coef(rng), coef(rng), 1.0 + std::abs(coef(rng))});
        const auto r = cubic_real_roots(q);
        ASSERT_GE(r.size(), 1u);
        ASSERT_LE(r.size(), 3u);
        for (std::size_t i = 0; i < r.size(); ++i) {
            const double scale = q.norm_inf() * std::pow(1.0 + std::abs(r[i]), 3);
            EXPECT_LT(std::abs(q.eval(r[i])), 1e-10 * scale);
            if (i > 0) EXPECT_LE(r[i - 1], r[i]);
        }
    }
}
