#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sausage_lab/error.hpp"
#include "sausage_lab/geometry.hpp"
#include "sausage_lab/rng.hpp"

using namespace sausage_lab;

namespace {

std::vector<double> random_points(std::size_t n, double spread, std::uint64_t seed) {
    rng::PhiloxEngine gen(seed);
    std::vector<double> pts(3 * n);
    for (auto& x : pts) x = spread * (2 * gen.uniform() - 1);
    return pts;
}

bool brute_covers(const std::vector<double>& pts, const CrossSection& K, const std::array<double, 3>& q) {
    for (std::size_t i = 0; i < pts.size() / 3; ++i) {
        const std::array<double, 3> y = {q[0] - pts[3 * i], q[1] - pts[3 * i + 1], q[2] - pts[3 * i + 2]};
        if (K.contains(y)) return true;
    }
    return false;
}

}  // namespace

TEST(CrossSection, ParsesBallsAndBoxes) {
    const auto ball = CrossSection::parse("ball:2.5");
    EXPECT_EQ(ball.shape(), CrossSection::Shape::Ball);
    EXPECT_DOUBLE_EQ(ball.radius(), 2.5);
    const auto box = CrossSection::parse("box:1,2,0.5");
    EXPECT_EQ(box.shape(), CrossSection::Shape::Box);
    EXPECT_EQ(box.half_widths(), (std::vector<double>{1, 2, 0.5}));
    EXPECT_THROW(CrossSection::parse("cylinder:1"), ConfigError);
    EXPECT_THROW(CrossSection::parse("ball:-1"), ConfigError);
    EXPECT_THROW(CrossSection::parse("box:1,0,1"), ConfigError);
    EXPECT_EQ(CrossSection::parse(ball.describe()), ball);
    EXPECT_EQ(CrossSection::parse(box.describe()), box);
}

TEST(CrossSection, RadiiAndVolumesAreClosedForm) {
    const auto ball = CrossSection::ball(2.0);
    EXPECT_DOUBLE_EQ(ball.coordinate_radius(), 2.0);
    EXPECT_DOUBLE_EQ(ball.volume(), 4.0 / 3.0 * std::numbers::pi * 8.0);
    EXPECT_NEAR(CrossSection::ball(1.0, 4).volume(), std::numbers::pi * std::numbers::pi / 2.0, 1e-12);
    const auto box = CrossSection::box({1.0, 3.0, 0.5});
    EXPECT_DOUBLE_EQ(box.coordinate_radius(), 3.0);
    EXPECT_DOUBLE_EQ(box.euclidean_radius(), std::sqrt(1.0 + 9.0 + 0.25));
    EXPECT_DOUBLE_EQ(box.volume(), 2.0 * 6.0 * 1.0);
}

TEST(CrossSection, ReflectionIsTheIdentityForSymmetricShapes) {
    EXPECT_EQ(CrossSection::ball(1.3).reflected(), CrossSection::ball(1.3));
    EXPECT_EQ(CrossSection::box({1, 2, 3}).reflected(), CrossSection::box({1, 2, 3}));
}

TEST(CrossSection, MembershipIsExactOnTheBoundary) {
    const auto ball = CrossSection::ball(1.0);
    EXPECT_TRUE(ball.contains(std::vector<double>{1.0, 0.0, 0.0}));
    EXPECT_FALSE(ball.contains(std::vector<double>{std::nextafter(1.0, 2.0), 0.0, 0.0}));
    const auto box = CrossSection::box({1, 2, 3});
    EXPECT_TRUE(box.contains(std::vector<double>{1.0, -2.0, 3.0}));
    EXPECT_FALSE(box.contains(std::vector<double>{1.0, -2.0, 3.0001}));
}

TEST(CrossSection, CubeTestsAgreeWithDenseSampling) {
    rng::PhiloxEngine gen(4);
    for (const auto& K : {CrossSection::ball(1.0), CrossSection::box({0.5, 1.0, 0.75})}) {
        for (int trial = 0; trial < 300; ++trial) {
            const std::array<double, 3> center = {0.0, 0.0, 0.0};
            const std::array<double, 3> cube = {3 * gen.uniform() - 1.5, 3 * gen.uniform() - 1.5,
                                                3 * gen.uniform() - 1.5};
            const double half = 0.05 + 0.4 * gen.uniform();
            bool any = false, all = true;
            for (int a = 0; a <= 10; ++a) {
                for (int b = 0; b <= 10; ++b) {
                    for (int c = 0; c <= 10; ++c) {
                        const std::array<double, 3> y = {cube[0] + half * (a / 5.0 - 1),
                                                         cube[1] + half * (b / 5.0 - 1),
                                                         cube[2] + half * (c / 5.0 - 1)};
                        const bool in = K.contains(y);
                        any = any || in;
                        all = all && in;
                    }
                }
            }
            // Sampling can only witness intersection and refute containment.
            if (any) {
                EXPECT_TRUE(K.meets_cube(center, cube, half));
            }
            if (!all) {
                EXPECT_FALSE(K.contains_cube(center, cube, half));
            }
        }
    }
}

TEST(PointIndex, CoversAgreesWithALinearScan) {
    for (const auto& K : {CrossSection::ball(1.0), CrossSection::ball(0.3), CrossSection::box({0.4, 1.0, 0.2})}) {
        const auto pts = random_points(400, 5.0, 17);
        const PointIndex index(pts, 3, K);
        rng::PhiloxEngine gen(18);
        int hits = 0;
        for (int i = 0; i < 20000; ++i) {
            const std::array<double, 3> q = {12 * gen.uniform() - 6, 12 * gen.uniform() - 6, 12 * gen.uniform() - 6};
            const bool want = brute_covers(pts, K, q);
            ASSERT_EQ(index.covers(q), want) << K.describe();
            hits += want;
        }
        EXPECT_GT(hits, 100);
    }
}

TEST(PointIndex, DenseClustersAgreeWithALinearScan) {
    // Many points per cell exercises the whole-cell shortcut.
    const auto pts = random_points(3000, 0.8, 31);
    const auto K = CrossSection::ball(1.0);
    const PointIndex index(pts, 3, K);
    rng::PhiloxEngine gen(32);
    for (int i = 0; i < 5000; ++i) {
        const std::array<double, 3> q = {5 * gen.uniform() - 2.5, 5 * gen.uniform() - 2.5, 5 * gen.uniform() - 2.5};
        ASSERT_EQ(index.covers(q), brute_covers(pts, K, q));
    }
}

TEST(PointIndex, FirstCoveringReturnsTheSmallestIndex) {
    const std::vector<double> pts = {5, 0, 0, 0.5, 0, 0, 0, 0, 0, 0.2, 0, 0};
    const PointIndex index(pts, 3, CrossSection::ball(1.0));
    EXPECT_EQ(index.first_covering(std::vector<double>{0.1, 0, 0}), 1u);
    EXPECT_EQ(index.first_covering(std::vector<double>{4.5, 0, 0}), 0u);
    EXPECT_EQ(index.first_covering(std::vector<double>{2.5, 0, 0}), PointIndex::npos);
}

TEST(PointIndex, CubeQueriesAgreeWithPerPointTests) {
    const auto pts = random_points(200, 4.0, 41);
    const auto K = CrossSection::ball(0.7);
    const PointIndex index(pts, 3, K);
    rng::PhiloxEngine gen(42);
    for (int i = 0; i < 2000; ++i) {
        const std::array<double, 3> c = {10 * gen.uniform() - 5, 10 * gen.uniform() - 5, 10 * gen.uniform() - 5};
        const double half = 0.02 + 0.5 * gen.uniform();
        bool meets = false, inside = false;
        for (std::size_t p = 0; p < 200; ++p) {
            const std::span<const double> x(pts.data() + 3 * p, 3);
            meets = meets || K.meets_cube(x, c, half);
            inside = inside || K.contains_cube(x, c, half);
        }
        ASSERT_EQ(index.meets_cube(c, half), meets);
        ASSERT_EQ(index.contains_cube(c, half), inside);
    }
}

TEST(PointIndex, EmptyIndexCoversNothing) {
    const PointIndex index(std::vector<double>{}, 3, CrossSection::ball(1.0));
    EXPECT_FALSE(index.covers(std::vector<double>{0, 0, 0}));
    EXPECT_EQ(index.size(), 0u);
}

TEST(PointIndex, SparseGridsStillAnswerCorrectly) {
    // Two far-apart clusters force the hashed (sparse) cell layout.
    std::vector<double> pts = {0, 0, 0, 1e4, 1e4, 1e4};
    const PointIndex index(pts, 3, CrossSection::ball(0.5));
    EXPECT_TRUE(index.covers(std::vector<double>{1e4 + 0.3, 1e4, 1e4}));
    EXPECT_FALSE(index.covers(std::vector<double>{5e3, 5e3, 5e3}));
}
