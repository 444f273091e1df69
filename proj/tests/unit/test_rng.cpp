#include <cmath>
#include <set>

#include <gtest/gtest.h>

#include "sausage_lab/rng.hpp"

namespace rng = sausage_lab::rng;

// Known-answer vectors published with Random123 (kat_vectors, philox4x32_10).
TEST(Philox, KnownAnswerVectors) {
    EXPECT_EQ(rng::philox4x32({0, 0, 0, 0}, {0, 0}),
              (rng::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
    EXPECT_EQ(rng::philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu}),
              (rng::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
    EXPECT_EQ(rng::philox4x32({0x243f6a88u, 0x85a308d3u, 0x13198a2eu, 0x03707344u}, {0xa4093822u, 0x299f31d0u}),
              (rng::Counter{0xd16cfe09u, 0x94fdccebu, 0x5001e420u, 0x24126ea1u}));
}

TEST(Philox, BlocksArePureFunctionsOfTheirCoordinates) {
    const rng::Philox a(42, rng::Stream::PathNoise);
    const rng::Philox b(42, rng::Stream::PathNoise);
    const rng::Philox other_stream(42, rng::Stream::SampleOffsets);
    EXPECT_EQ(a.block(17, 3), b.block(17, 3));
    EXPECT_NE(a.block(17, 3), a.block(18, 3));
    EXPECT_NE(a.block(17, 3), a.block(17, 4));
    EXPECT_NE(a.block(17, 3), other_stream.block(17, 3));
}

TEST(Philox, NormalsHaveUnitMomentsAndUniformsStayInRange) {
    const rng::Philox gen(7);
    const int n = 200000;
    double sum = 0.0, sum2 = 0.0;
    for (int i = 0; i < n; ++i) {
        for (double z : gen.normals(static_cast<std::uint64_t>(i))) {
            sum += z;
            sum2 += z * z;
        }
        for (double u : gen.uniforms(static_cast<std::uint64_t>(i))) {
            ASSERT_GE(u, 0.0);
            ASSERT_LT(u, 1.0);
        }
    }
    const double count = 4.0 * n;
    EXPECT_NEAR(sum / count, 0.0, 5.0 / std::sqrt(count));
    EXPECT_NEAR(sum2 / count, 1.0, 5.0 * std::sqrt(2.0 / count));
}

TEST(Seeds, DerivedChildrenDoNotCollide) {
    std::set<std::uint64_t> seen;
    for (std::uint64_t i = 0; i < 100000; ++i) seen.insert(rng::derive_seed(1, i));
    EXPECT_EQ(seen.size(), 100000u);
    EXPECT_NE(rng::derive_seed(1, 0), rng::derive_seed(2, 0));
}

TEST(Seeds, OpenUnitNeverHitsTheEndpoints) {
    EXPECT_GT(rng::to_open_unit(0), 0.0);
    EXPECT_LT(rng::to_open_unit(0xffffffffu), 1.0);
}

TEST(PhiloxEngine, IsAReproducibleBitGenerator) {
    rng::PhiloxEngine a(9, rng::Stream::Obstacles), b(9, rng::Stream::Obstacles);
    for (int i = 0; i < 100; ++i) ASSERT_EQ(a(), b());
    double u = a.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
}
