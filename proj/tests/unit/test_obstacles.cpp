#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "sausage_lab/error.hpp"
#include "sausage_lab/obstacles.hpp"
#include "sausage_lab/rates.hpp"
#include "sausage_lab/sausage.hpp"

using namespace sausage_lab;

namespace {

Path short_path(std::uint64_t seed, std::size_t n = 500, double eps = 0.5) {
    IntegratorConfig cfg;
    cfg.epsilon = eps;
    cfg.n_steps = n;
    cfg.seed = seed;
    return integrate(VelocityField::taylor_green(), cfg);
}

std::vector<SurvivalTrial> exponential_trials(double lambda, double window, std::size_t n, std::uint64_t seed) {
    rng::PhiloxEngine gen(seed, rng::Stream::PathNoise);
    std::vector<SurvivalTrial> trials(n);
    for (auto& tr : trials) {
        const double t = -std::log(1.0 - gen.uniform()) / lambda;
        tr.hit = t <= window;
        tr.censored = !tr.hit;
        tr.t_hit = tr.hit ? t : window;
    }
    return trials;
}

}  // namespace

TEST(SampleObstacles, MeanCountIsIntensityTimesVolume) {
    const auto region = Region::cube(std::vector<double>{0.5, 0.5, 0.5}, 0.5);
    double total = 0.0;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        total += static_cast<double>(sample_obstacles(1.0, region, CrossSection::ball(0.1), s).count());
    }
    EXPECT_NEAR(total / 10000.0, 1.0, 0.03);
}

TEST(SampleObstacles, SparseIntensity) {
    const auto region = Region::cube(std::vector<double>{5, 5, 5}, 5);
    double total = 0.0;
    for (std::uint64_t s = 0; s < 10000; ++s) {
        total += static_cast<double>(sample_obstacles(1e-4, region, CrossSection::ball(1.0), s).count());
    }
    EXPECT_NEAR(total / 10000.0, 0.1, 0.012);
}

TEST(SampleObstacles, PointsLieInTheRegionAndAreReproducible) {
    Region region;
    region.lo = {-1, 2, 0};
    region.hi = {3, 4, 0.5};
    const auto a = sample_obstacles(50.0, region, CrossSection::ball(0.2), 8);
    const auto b = sample_obstacles(50.0, region, CrossSection::ball(0.2), 8);
    EXPECT_EQ(a.points, b.points);
    EXPECT_GT(a.count(), 100u);
    for (std::size_t i = 0; i < a.count(); ++i) {
        EXPECT_TRUE(region.contains(std::span<const double>(a.points.data() + 3 * i, 3)));
    }
}

TEST(SampleObstacles, RejectsBadInputs) {
    const auto region = Region::cube(std::vector<double>{0, 0, 0}, 1.0);
    EXPECT_THROW(sample_obstacles(0.0, region, CrossSection::ball(1.0), 1), ConfigError);
    EXPECT_THROW(sample_obstacles(1e8, region, CrossSection::ball(1.0), 1), ResourceError);
    Region flat;
    flat.lo = {0, 0, 0};
    flat.hi = {1, 0, 1};
    EXPECT_THROW(sample_obstacles(1.0, flat, CrossSection::ball(1.0), 1), ConfigError);
}

TEST(FirstHittingTime, EmptyFieldIsNeverHit) {
    ObstacleField field;
    field.intensity_rho = 1.0;
    field.region = Region::cube(std::vector<double>{0, 0, 0}, 50.0);
    const auto res = first_hitting_time(short_path(1), field);
    EXPECT_FALSE(res.hit);
    EXPECT_FALSE(res.t_hit.has_value());
    EXPECT_FALSE(res.boundary_censored);
}

TEST(FirstHittingTime, ObstacleAtTheStartHitsImmediately) {
    ObstacleField field;
    field.intensity_rho = 1.0;
    field.region = Region::cube(std::vector<double>{0, 0, 0}, 50.0);
    field.points = {0.0, 0.0, 0.0};
    const auto res = first_hitting_time(short_path(1), field, 4.0);
    ASSERT_TRUE(res.hit);
    EXPECT_EQ(*res.t_hit, 0.0);
    EXPECT_EQ(*res.t_hit_rescaled, 0.0);
}

TEST(FirstHittingTime, HitsAndMissesAgreeWithBruteForce) {
    const auto region = Region::cube(std::vector<double>{0, 0, 0}, 8.0);
    const auto K = CrossSection::ball(0.5);
    int hits = 0;
    for (std::uint64_t s = 0; s < 40; ++s) {
        const auto path = short_path(100 + s, 300);
        const auto field = sample_obstacles(0.05, region, K, s);
        const auto res = first_hitting_time(path, field, 1.0, 0.0);
        ASSERT_FALSE(res.boundary_censored);
        const std::size_t last = res.hit ? res.step : path.size();
        const Path obstacles(3, 1.0, 0, field.points);
        for (std::size_t n = 0; n < last; ++n) {
            ASSERT_FALSE(obstacles.size() && sausage_contains_bruteforce(obstacles, K, path.point(n)));
        }
        if (res.hit) {
            ++hits;
            EXPECT_TRUE(sausage_contains_bruteforce(obstacles, K, path.point(res.step)));
            EXPECT_DOUBLE_EQ(*res.t_hit, static_cast<double>(res.step) * path.dt());
        }
    }
    EXPECT_GT(hits, 3);
    EXPECT_LT(hits, 40);
}

TEST(FirstHittingTime, LeavingTheSafeRegionIsCensored) {
    ObstacleField field;
    field.intensity_rho = 1.0;
    field.region = Region::cube(std::vector<double>{0, 0, 0}, 1.5);
    const auto res = first_hitting_time(short_path(2, 2000, 1.0), field, 1.0, 0.0);
    EXPECT_TRUE(res.boundary_censored);
    EXPECT_FALSE(res.hit);
}

TEST(SurvivalIdentity, MatchesExpOfMinusRhoTimesSausageVolume) {
    // P(path avoids K + P) = exp(-ρ|S^K̂|) per fixed path.
    const auto K = CrossSection::ball(0.5);
    for (std::uint64_t s = 0; s < 3; ++s) {
        const auto path = short_path(200 + s, 200);
        const double volume = voxel_oracle_volume(path, K.reflected(), 8);
        const double rho = std::log(2.0) / volume;
        const auto count = empirical_survival(path, K, rho, 1000, 900 + s, 1);
        const double p = std::exp(-rho * volume);
        const double se = std::sqrt(p * (1 - p) / 1000.0);
        EXPECT_NEAR(count.fraction(), p, 3 * se);
    }
}

TEST(SurvivalExperiment, FitsARateAndReportsDiagnostics) {
    SurvivalParams p;
    p.sigma = 4.0;
    p.n_paths = 150;
    p.horizon = 1.0;
    p.lambda_bar_ref = 2 * std::numbers::pi;
    p.workers = 1;
    const auto res = survival_experiment(VelocityField::zero(), 1.0, CrossSection::ball(1.0), p);
    EXPECT_EQ(res.trials.size(), 150u);
    EXPECT_GE(res.n_hits, 30u);
    EXPECT_GT(res.lambda_hat, 0.0);
    EXPECT_GE(res.ks_distance, 0.0);
    EXPECT_LE(res.ks_distance, 1.0);
    EXPECT_EQ(res.n_boundary, 0u);
    for (const auto& tr : res.trials) {
        EXPECT_NE(tr.hit, tr.censored);
        EXPECT_LE(tr.t_hit, p.horizon + 1e-9);
    }
}

TEST(SurvivalExperiment, IsReproducible) {
    SurvivalParams p;
    p.sigma = 3.0;
    p.n_paths = 60;
    p.lambda_bar_ref = 6.0;
    p.workers = 1;
    const auto a = survival_experiment(VelocityField::taylor_green(), 1.0, CrossSection::ball(1.0), p);
    p.workers = 2;
    const auto b = survival_experiment(VelocityField::taylor_green(), 1.0, CrossSection::ball(1.0), p);
    ASSERT_EQ(a.trials.size(), b.trials.size());
    for (std::size_t i = 0; i < a.trials.size(); ++i) {
        EXPECT_EQ(a.trials[i].t_hit, b.trials[i].t_hit);
        EXPECT_EQ(a.trials[i].seed_field, b.trials[i].seed_field);
    }
    EXPECT_EQ(a.lambda_hat, b.lambda_hat);
}

TEST(SurvivalExperiment, TooFewHitsIsInsufficientData) {
    SurvivalParams p;
    p.sigma = 3.0;
    p.n_paths = 10;
    p.horizon = 0.01;
    p.lambda_bar_ref = 6.0;
    p.workers = 1;
    EXPECT_THROW(survival_experiment(VelocityField::zero(), 1.0, CrossSection::ball(1.0), p), InsufficientDataError);
}

TEST(SurvivalExperiment, WarnsWhenTheWindowIsTooShort) {
    SurvivalParams p;
    p.sigma = 3.0;
    p.n_paths = 200;
    p.horizon = 0.1;
    p.lambda_bar_ref = 6.0;
    p.workers = 1;
    try {
        const auto res = survival_experiment(VelocityField::zero(), 1.0, CrossSection::ball(1.0), p);
        EXPECT_FALSE(res.advisory.empty());
    } catch (const InsufficientDataError&) {
        SUCCEED();
    }
}

TEST(Diagnostics, KolmogorovSmirnovOnExactExponentialSamples) {
    const auto trials = exponential_trials(2.0, 1.5, 4000, 3);
    EXPECT_LT(ks_distance_exponential(trials, 2.0, 1.5), 0.03);
    EXPECT_GT(ks_distance_exponential(trials, 4.0, 1.5), 0.2);
    const auto other = exponential_trials(2.0, 1.5, 4000, 4);
    EXPECT_LT(ks_distance_two_sample(trials, other, 1.5), 0.04);
    EXPECT_GT(ks_distance_two_sample(trials, exponential_trials(1.0, 1.5, 4000, 5), 1.5), 0.1);
}

TEST(Diagnostics, CensoredMaximumLikelihoodRecoversTheRate) {
    const auto trials = exponential_trials(3.0, 0.5, 20000, 6);
    double exposure = 0.0, hits = 0.0;
    for (const auto& tr : trials) {
        exposure += tr.t_hit;
        hits += tr.hit;
    }
    EXPECT_NEAR(hits / exposure, 3.0, 0.1);
}

TEST(Diagnostics, MemorylessnessHoldsForExponentialData) {
    const auto trials = exponential_trials(2.0, 2.0, 5000, 7);
    const auto check = memoryless_check(trials, 0.25, 0.25);
    EXPECT_TRUE(check.within(3.0)) << check.conditional << " vs " << check.unconditional;
    EXPECT_NEAR(check.unconditional, std::exp(-0.5), 0.03);
}
