#pragma once

// Counter-based random numbers.
//
// Every random quantity in the library is a pure function of
// (key, stream, index, block), so paths, sampling offsets and obstacle
// fields can be regenerated in any order and on any number of workers.
// The bit generator is Philox4x32-10 (Salmon et al., SC'11).

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>

namespace sausage_lab::rng {

using Counter = std::array<std::uint32_t, 4>;
using Key = std::array<std::uint32_t, 2>;

namespace detail {

inline constexpr std::uint32_t kMulA = 0xD2511F53u;
inline constexpr std::uint32_t kMulB = 0xCD9E8D57u;
inline constexpr std::uint32_t kWeylA = 0x9E3779B9u;
inline constexpr std::uint32_t kWeylB = 0xBB67AE85u;

constexpr void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t& hi, std::uint32_t& lo) {
    const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
    hi = static_cast<std::uint32_t>(p >> 32);
    lo = static_cast<std::uint32_t>(p);
}

}  // namespace detail

/// Philox4x32 with 10 rounds.
constexpr Counter philox4x32(Counter ctr, Key key) {
    for (int round = 0; round < 10; ++round) {
        std::uint32_t hi0 = 0, lo0 = 0, hi1 = 0, lo1 = 0;
        detail::mulhilo(detail::kMulA, ctr[0], hi0, lo0);
        detail::mulhilo(detail::kMulB, ctr[2], hi1, lo1);
        ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
        key[0] += detail::kWeylA;
        key[1] += detail::kWeylB;
    }
    return ctr;
}

/// SplitMix64 finalizer; used to derive child seeds from (parent, index).
constexpr std::uint64_t mix64(std::uint64_t z) {
    z += 0x9E3779B97F4A7C15ull;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

/// Seed of child `index` of `parent`; children of one parent never collide
/// for distinct indices (mix64 is a bijection).
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t index) {
    return mix64(mix64(parent) ^ mix64(index + 0x632BE59BD9B4E019ull));
}

/// Streams separate independent uses of one seed.
enum class Stream : std::uint32_t {
    PathNoise = 1,
    SampleOffsets = 2,
    Obstacles = 3,
    Validation = 4,
};

/// Uniform in (0, 1) from a 32-bit word; never returns 0 or 1.
constexpr double to_open_unit(std::uint32_t w) {
    return (static_cast<double>(w) + 0.5) * 0x1.0p-32;
}

/// Uniform in [0, 1) with 53 random bits.
constexpr double to_unit53(std::uint32_t hi, std::uint32_t lo) {
    const std::uint64_t bits = (static_cast<std::uint64_t>(hi) << 21) ^ (lo >> 11);
    return static_cast<double>(bits & ((1ull << 53) - 1)) * 0x1.0p-53;
}

/// Keyed counter-based generator. Block `b` at `index` yields four words.
class Philox {
public:
    constexpr explicit Philox(std::uint64_t seed, Stream stream = Stream::PathNoise)
        : key_{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32)},
          stream_(static_cast<std::uint32_t>(stream)) {}

    [[nodiscard]] constexpr Counter block(std::uint64_t index, std::uint32_t sub = 0) const {
        return philox4x32(
            {static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32), sub, stream_},
            key_);
    }

    /// Four independent standard normals for (index, sub) via Box-Muller.
    [[nodiscard]] std::array<double, 4> normals(std::uint64_t index, std::uint32_t sub = 0) const {
        const Counter w = block(index, sub);
        std::array<double, 4> out{};
        for (int pair = 0; pair < 2; ++pair) {
            const double u1 = to_open_unit(w[2 * pair]);
            const double u2 = to_open_unit(w[2 * pair + 1]);
            const double radius = std::sqrt(-2.0 * std::log(u1));
            const double angle = 2.0 * std::numbers::pi * u2;
            out[2 * pair] = radius * std::cos(angle);
            out[2 * pair + 1] = radius * std::sin(angle);
        }
        return out;
    }

    /// Two uniforms in [0, 1) with 53 bits each.
    [[nodiscard]] constexpr std::array<double, 2> uniforms(std::uint64_t index, std::uint32_t sub = 0) const {
        const Counter w = block(index, sub);
        return {to_unit53(w[0], w[1]), to_unit53(w[2], w[3])};
    }

private:
    Key key_;
    std::uint32_t stream_;
};

/// Sequential adapter satisfying UniformRandomBitGenerator, so standard
/// distributions (e.g. std::poisson_distribution) can draw from a keyed stream.
class PhiloxEngine {
public:
    using result_type = std::uint32_t;

    explicit PhiloxEngine(std::uint64_t seed, Stream stream = Stream::Validation) : gen_(seed, stream) {}

    static constexpr result_type min() { return 0; }
    static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

    result_type operator()() {
        if (lane_ == 4) {
            buffer_ = gen_.block(counter_++);
            lane_ = 0;
        }
        return buffer_[lane_++];
    }

    /// Uniform in [0, 1) with 53 bits.
    double uniform() {
        const std::uint32_t hi = (*this)();
        const std::uint32_t lo = (*this)();
        return to_unit53(hi, lo);
    }

private:
    Philox gen_;
    std::uint64_t counter_ = 0;
    Counter buffer_{};
    int lane_ = 4;
};

}  // namespace sausage_lab::rng
