#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sausage_lab/error.hpp"
#include "sausage_lab/rates.hpp"
#include "sausage_lab/sausage.hpp"

using namespace sausage_lab;
using std::numbers::pi;

namespace {

Path constant_path(std::size_t n = 10, std::vector<double> at = {0, 0, 0}) {
    std::vector<double> data;
    for (std::size_t i = 0; i <= n; ++i) data.insert(data.end(), at.begin(), at.end());
    return Path(3, 0.01, 0, data);
}

Path segment_path(double length, std::size_t n) {
    std::vector<double> data;
    for (std::size_t i = 0; i <= n; ++i) {
        data.push_back(length * static_cast<double>(i) / static_cast<double>(n));
        data.push_back(0.0);
        data.push_back(0.0);
    }
    return Path(3, 0.01, 0, data);
}

Path diffusive_path(std::uint64_t seed, std::size_t n = 1000, double eps = 0.25,
                    const VelocityField& field = VelocityField::taylor_green()) {
    IntegratorConfig cfg;
    cfg.epsilon = eps;
    cfg.n_steps = n;
    cfg.seed = seed;
    return integrate(field, cfg);
}

}  // namespace

TEST(BoundingCube, MatchesTheClosedFormExamples) {
    const auto K = CrossSection::ball(1.0);
    const auto point = bounding_cube(constant_path(), K);
    EXPECT_DOUBLE_EQ(point.side, 2.0);
    EXPECT_EQ(point.center, (std::vector<double>{0, 0, 0}));
    EXPECT_DOUBLE_EQ(bounding_cube(segment_path(3.0, 300), K).side, 8.0);
}

TEST(BoundingCube, ContainsEveryTranslateOfK) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto path = diffusive_path(seed);
        const auto K = CrossSection::box({0.5, 1.0, 0.25});
        const auto cube = bounding_cube(path, K);
        const double half = cube.side / 2.0;
        for (std::size_t n = 0; n < path.size(); ++n) {
            for (std::size_t k = 0; k < 3; ++k) {
                const double h = K.half_widths()[k];
                ASSERT_GE(path.point(n)[k] - h, cube.center[k] - half - 1e-12);
                ASSERT_LE(path.point(n)[k] + h, cube.center[k] + half + 1e-12);
            }
        }
    }
}

TEST(RefineCells, DepthZeroKeepsTheBoundingCube) {
    const auto cover = refine_cells(diffusive_path(3), CrossSection::ball(1.0), 0);
    EXPECT_EQ(cover.count(), 1u);
}

TEST(RefineCells, PointSausageTouchesAllOctants) {
    EXPECT_EQ(refine_cells(constant_path(), CrossSection::ball(1.0), 1).count(), 8u);
}

TEST(RefineCells, CountGrowsAndCoveredVolumeShrinksWithDepth) {
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto path = diffusive_path(seed, 2000);
        const auto K = CrossSection::ball(1.0);
        std::size_t previous_count = 0;
        double previous_volume = INFINITY;
        for (int m = 0; m <= 6; ++m) {
            const auto cover = refine_cells(path, K, m);
            EXPECT_GE(cover.count(), previous_count);
            EXPECT_LE(cover.covered_volume(), previous_volume * (1 + 1e-12));
            previous_count = cover.count();
            previous_volume = cover.covered_volume();
        }
        EXPECT_GE(previous_volume, voxel_oracle_volume(path, K, 7) * 0.999);
    }
}

TEST(RefineCells, RetainedCubesAreExactlyThoseMeetingTheSausage) {
    const auto path = diffusive_path(9, 300);
    for (const auto& K : {CrossSection::ball(0.6), CrossSection::box({0.3, 0.6, 0.2})}) {
        const auto cover = refine_cells(path, K, 4);
        const auto cube = cover.cube;
        const double side = cover.side;
        // Enumerate every sub-cube and compare against a direct test.
        std::size_t expected = 0;
        for (int a = 0; a < 16; ++a) {
            for (int b = 0; b < 16; ++b) {
                for (int c = 0; c < 16; ++c) {
                    const std::array<double, 3> y = {cube.center[0] - cube.side / 2 + side * (a + 0.5),
                                                     cube.center[1] - cube.side / 2 + side * (b + 0.5),
                                                     cube.center[2] - cube.side / 2 + side * (c + 0.5)};
                    for (std::size_t n = 0; n < path.size(); ++n) {
                        if (K.meets_cube(path.point(n), y, side / 2)) {
                            ++expected;
                            break;
                        }
                    }
                }
            }
        }
        EXPECT_EQ(cover.count(), expected) << K.describe();
    }
}

TEST(RefineCells, RejectsNegativeDepth) {
    EXPECT_THROW(refine_cells(constant_path(), CrossSection::ball(1.0), -1), ConfigError);
}

TEST(EstimateVolume, PointSausageIsTheBall) {
    const auto est = estimate_volume(constant_path(), CrossSection::ball(1.0), 4, 10000, 1);
    EXPECT_NEAR(est.v_hat / (4.0 / 3.0 * pi), 1.0, 0.02);
}

TEST(EstimateVolume, SegmentSausageIsACapsule) {
    const auto est = estimate_volume(segment_path(5.0, 5000), CrossSection::ball(1.0), 4, 10000, 2);
    EXPECT_NEAR(est.v_hat / (5.0 * pi + 4.0 / 3.0 * pi), 1.0, 0.02);
}

TEST(EstimateVolume, BoxSausageOfAPointIsTheBox) {
    const auto K = CrossSection::box({0.5, 1.0, 0.25});
    const auto est = estimate_volume(constant_path(), K, 3, 2000, 3);
    EXPECT_NEAR(est.v_hat, K.volume(), 1e-9);  // every retained cube lies inside the box
}

TEST(EstimateVolume, ReportsConsistentFields) {
    const auto path = diffusive_path(4, 2000);
    const auto est = estimate_volume(path, CrossSection::ball(1.0), 4, 500, 77);
    const double cell = est.L / 16.0;
    EXPECT_GE(est.v_hat, 0.0);
    EXPECT_LE(est.v_hat, static_cast<double>(est.I) * cell * cell * cell * (1 + 1e-12));
    EXPECT_EQ(est.gamma_hat, est.v_hat / est.T);
    EXPECT_DOUBLE_EQ(est.T, 20.0);
    EXPECT_EQ(est.m, 4);
    EXPECT_EQ(est.J, 500u);
    EXPECT_EQ(est.seed, 77u);
    EXPECT_DOUBLE_EQ(est.L, bounding_cube(path, CrossSection::ball(1.0)).side);
    EXPECT_GT(est.std_error, 0.0);
}

TEST(EstimateVolume, HitsAreGenuineSausagePoints) {
    // Recount every sample with the linear-scan membership test.
    const auto path = diffusive_path(5, 200);
    const auto K = CrossSection::ball(0.5);
    const int m = 3;
    const std::size_t J = 200;
    const auto est = estimate_volume(path, K, m, J, 11);
    const auto cover = refine_cells(path, K, m);
    const auto u = sample_offsets(J, 3, 11);
    std::uint64_t hits = 0;
    for (std::size_t i = 0; i < cover.count(); ++i) {
        for (std::size_t j = 0; j < J; ++j) {
            std::array<double, 3> q{};
            for (std::size_t k = 0; k < 3; ++k) q[k] = cover.centers[3 * i + k] + cover.side * u[3 * j + k];
            hits += sausage_contains_bruteforce(path, K, q);
        }
    }
    EXPECT_EQ(est.hits, hits);
}

TEST(EstimateVolume, OffsetsAreSharedAndUniform) {
    const auto u = sample_offsets(20000, 3, 5);
    double mean = 0.0;
    for (double x : u) {
        ASSERT_GE(x, -0.5);
        ASSERT_LE(x, 0.5);
        mean += x;
    }
    EXPECT_NEAR(mean / static_cast<double>(u.size()), 0.0, 0.01);
    EXPECT_EQ(sample_offsets(10, 3, 5), std::vector<double>(u.begin(), u.begin() + 30));
}

TEST(EstimateVolume, ResultDoesNotDependOnWorkerCount) {
    const auto path = diffusive_path(6, 3000);
    const auto a = estimate_volume(path, CrossSection::ball(1.0), 4, 300, 9, 1);
    const auto b = estimate_volume(path, CrossSection::ball(1.0), 4, 300, 9, 3);
    EXPECT_EQ(a.hits, b.hits);
    EXPECT_EQ(a.v_hat, b.v_hat);
}

TEST(EstimateVolume, EmptySamplingIsDegenerate) {
    EXPECT_THROW(estimate_volume(constant_path(), CrossSection::ball(1.0), 4, 0, 1), DegenerateInputError);
}

TEST(EstimateVolume, PrefixVolumeIsNotLarger) {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto path = diffusive_path(seed, 2000);
        const auto full = estimate_volume(path, CrossSection::ball(1.0), 4, 2000, 3);
        const auto half = estimate_volume(path.prefix(1000), CrossSection::ball(1.0), 4, 2000, 3);
        EXPECT_LE(half.v_hat, full.v_hat + 2 * std::hypot(half.std_error, full.std_error));
    }
}

TEST(EstimateVolume, TranslationDoesNotChangeTheEstimate) {
    const auto path = diffusive_path(8, 1000);
    const std::vector<double> shift = {0.375, -1.25, 2.5};  // dyadic: translation is exact
    const auto a = estimate_volume(path, CrossSection::ball(1.0), 4, 1000, 4);
    const auto b = estimate_volume(path.translated(shift), CrossSection::ball(1.0), 4, 1000, 4);
    EXPECT_NEAR(a.v_hat, b.v_hat, 2 * std::hypot(a.std_error, b.std_error));
}

TEST(EstimateVolume, AgreesWithTheVoxelOracleOnShortPaths) {
    for (std::uint64_t i = 0; i < 3; ++i) {
        const auto seeds = realization_seeds(2024, i);
        const auto path = diffusive_path(seeds.path, 1000);
        const auto est = estimate_volume(path, CrossSection::ball(1.0), 4, 1000, seeds.sampling);
        const double oracle = voxel_oracle_volume(path, CrossSection::ball(1.0), 8);
        EXPECT_LE(std::abs(est.v_hat - oracle) / oracle, 0.02);
    }
}

TEST(VoxelOracle, ResolvesTheUnitBall) {
    EXPECT_NEAR(voxel_oracle_volume(constant_path(), CrossSection::ball(1.0), 9) / (4.0 / 3.0 * pi), 1.0, 0.01);
}

TEST(VoxelOracle, ResolvesACapsuleAndABox) {
    EXPECT_NEAR(voxel_oracle_volume(segment_path(5.0, 5000), CrossSection::ball(1.0), 8) / (5 * pi + 4 * pi / 3), 1.0,
                0.01);
    const auto K = CrossSection::box({0.5, 1.0, 0.25});
    EXPECT_NEAR(voxel_oracle_volume(constant_path(), K, 7), K.volume(), 0.02 * K.volume());
}

TEST(VoxelOracle, TinyBallsStayWithinAFactorOfEight) {
    // The bounding cube shrinks with R_K, so even a 1e-6 ball is resolved.
    const double r = 1e-6;
    const double v = voxel_oracle_volume(constant_path(), CrossSection::ball(r), 9);
    const double exact = 4.0 / 3.0 * pi * r * r * r;
    EXPECT_GT(v, exact / 8);
    EXPECT_LT(v, exact * 8);
}

TEST(VoxelOracle, EnforcesTheVoxelBudget) {
    EXPECT_THROW(voxel_oracle_volume(constant_path(), CrossSection::ball(1.0), 11), ResourceError);
}

TEST(BruteForce, MembershipMatchesTheDefinition) {
    const auto path = segment_path(2.0, 2);
    const auto K = CrossSection::ball(0.5);
    EXPECT_TRUE(sausage_contains_bruteforce(path, K, std::vector<double>{1.0, 0.5, 0.0}));
    EXPECT_FALSE(sausage_contains_bruteforce(path, K, std::vector<double>{0.5, 0.45, 0.0}));
}
