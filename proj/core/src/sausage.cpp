#include "sausage_lab/sausage.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

#include "sausage_lab/error.hpp"
#include "sausage_lab/parallel.hpp"
#include "sausage_lab/rng.hpp"

namespace sausage_lab {
namespace {

void check_dims(const Path& path, const CrossSection& K) {
    if (path.size() == 0) throw DegenerateInputError("empty path");
    if (path.dimension() != K.dimension()) {
        throw ConfigError("cross-section dimension " + std::to_string(K.dimension()) +
                          " does not match path dimension " + std::to_string(path.dimension()));
    }
}

// Sets bits [first, last] of a row of 64-bit words.
void set_bits(std::uint64_t* row, std::int64_t first, std::int64_t last) {
    if (first > last) return;
    auto w0 = static_cast<std::size_t>(first >> 6);
    auto w1 = static_cast<std::size_t>(last >> 6);
    const std::uint64_t head = ~0ull << (first & 63);
    const std::uint64_t tail = ~0ull >> (63 - (last & 63));
    if (w0 == w1) {
        row[w0] |= head & tail;
        return;
    }
    row[w0] |= head;
    for (std::size_t w = w0 + 1; w < w1; ++w) row[w] = ~0ull;
    row[w1] |= tail;
}

}  // namespace

double CellCover::covered_volume() const {
    return static_cast<double>(count()) * std::pow(side, static_cast<double>(cube.center.size()));
}

BoundingCube bounding_cube(const Path& path, const CrossSection& K) {
    check_dims(path, K);
    const auto x0 = path.start();
    double reach = 0.0;
    for (std::size_t n = 1; n < path.size(); ++n) {
        const auto p = path.point(n);
        for (std::size_t k = 0; k < x0.size(); ++k) reach = std::max(reach, std::abs(p[k] - x0[k]));
    }
    return {{x0.begin(), x0.end()}, 2.0 * (K.coordinate_radius() + reach)};
}

CellCover refine_cells(const Path& path, const CrossSection& K, int m) {
    check_dims(path, K);
    const PointIndex index(path.data(), path.dimension(), K);
    return refine_cells(path, index, K, m);
}

CellCover refine_cells(const Path& path, const PointIndex& index, const CrossSection& K, int m) {
    if (m < 0) throw ConfigError("subdivision depth m must be >= 0");
    if (m > 30) throw ConfigError("subdivision depth m must be <= 30");
    CellCover cover;
    cover.cube = bounding_cube(path, K);
    cover.depth = m;
    const auto d = static_cast<std::size_t>(path.dimension());
    const std::size_t children = std::size_t{1} << d;

    std::vector<double> level = cover.cube.center;
    double side = cover.cube.side;
    std::vector<double> next;
    for (int depth = 1; depth <= m; ++depth) {
        const double quarter = side / 4.0;
        next.clear();
        std::array<double, kMaxDim> child{};
        for (std::size_t c = 0; c < level.size() / d; ++c) {
            const double* parent = level.data() + c * d;
            for (std::size_t orth = 0; orth < children; ++orth) {
                for (std::size_t k = 0; k < d; ++k) {
                    child[k] = parent[k] + (((orth >> k) & 1u) ? quarter : -quarter);
                }
                if (index.meets_cube({child.data(), d}, quarter)) next.insert(next.end(), child.begin(), child.begin() + static_cast<std::ptrdiff_t>(d));
            }
        }
        level.swap(next);
        side /= 2.0;
    }
    cover.side = side;
    cover.centers = std::move(level);
    return cover;
}

std::vector<double> sample_offsets(std::size_t J, int dimension, std::uint64_t seed) {
    const auto d = static_cast<std::size_t>(dimension);
    const rng::Philox gen(seed, rng::Stream::SampleOffsets);
    std::vector<double> u(J * d);
    for (std::size_t j = 0; j < J; ++j) {
        for (std::size_t k = 0; k < d; k += 2) {
            const auto pair = gen.uniforms(j, static_cast<std::uint32_t>(k / 2));
            u[j * d + k] = pair[0] - 0.5;
            if (k + 1 < d) u[j * d + k + 1] = pair[1] - 0.5;
        }
    }
    return u;
}

SausageEstimate estimate_volume(const Path& path, const CrossSection& K, int m, std::size_t J,
                                std::uint64_t seed, std::size_t workers) {
    check_dims(path, K);
    const PointIndex index(path.data(), path.dimension(), K);
    const CellCover cover = refine_cells(path, index, K, m);
    const std::size_t I = cover.count();
    if (I * J == 0) {
        throw DegenerateInputError("sampling is empty (I = " + std::to_string(I) + ", J = " + std::to_string(J) + ")");
    }
    const auto d = static_cast<std::size_t>(path.dimension());
    const std::vector<double> offsets = sample_offsets(J, path.dimension(), seed);

    std::vector<std::uint64_t> hits(I, 0);
    parallel_for(I, resolve_workers(workers), [&](std::size_t i) {
        const double* y = cover.centers.data() + i * d;
        // Every sample of a sub-cube inside one translate of K is a hit.
        if (index.contains_cube({y, d}, cover.side / 2.0)) {
            hits[i] = J;
            return;
        }
        std::array<double, kMaxDim> q{};
        std::uint64_t count = 0;
        for (std::size_t j = 0; j < J; ++j) {
            const double* u = offsets.data() + j * d;
            for (std::size_t k = 0; k < d; ++k) q[k] = y[k] + cover.side * u[k];
            if (index.covers({q.data(), d})) ++count;
        }
        hits[i] = count;
    });

    std::uint64_t total = 0;
    for (auto h : hits) total += h;

    SausageEstimate est;
    const double cell_volume = std::pow(cover.side, static_cast<double>(d));
    const double samples = static_cast<double>(I) * static_cast<double>(J);
    const double p = static_cast<double>(total) / samples;
    est.v_hat = static_cast<double>(total) * cell_volume / static_cast<double>(J);
    est.T = path.duration();
    est.gamma_hat = est.T > 0.0 ? est.v_hat / est.T : 0.0;
    est.m = m;
    est.J = J;
    est.I = I;
    est.L = cover.cube.side;
    est.std_error = static_cast<double>(I) * cell_volume * std::sqrt(p * (1.0 - p) / samples);
    est.seed = seed;
    est.hits = total;
    return est;
}

double voxel_oracle_volume(const Path& path, const CrossSection& K, int resolution) {
    check_dims(path, K);
    const auto d = static_cast<std::size_t>(path.dimension());
    if (resolution < 0 || static_cast<double>(resolution) * static_cast<double>(d) > 31.0) {
        throw ResourceError("voxel oracle: 2^(" + std::to_string(resolution) + "·" + std::to_string(d) +
                            ") voxels exceeds the budget of 2^31");
    }
    const BoundingCube cube = bounding_cube(path, K);
    const std::int64_t per_axis = std::int64_t{1} << resolution;
    const double h = cube.side / static_cast<double>(per_axis);
    std::array<double, kMaxDim> start{};
    for (std::size_t k = 0; k < d; ++k) start[k] = cube.center[k] - cube.side / 2.0 + h / 2.0;  // first voxel centre

    const std::size_t words_per_row = static_cast<std::size_t>((per_axis + 63) / 64);
    std::uint64_t rows = 1;
    for (std::size_t k = 1; k < d; ++k) rows *= static_cast<std::uint64_t>(per_axis);
    std::vector<std::uint64_t> bits(rows * words_per_row, 0);

    const bool ball = K.shape() == CrossSection::Shape::Ball;
    const double reach = K.coordinate_radius();
    const double r2 = K.radius() * K.radius();

    // Voxel index range whose centres lie in [a, b] along axis k.
    auto index_range = [&](double a, double b, std::size_t k) {
        auto lo = static_cast<std::int64_t>(std::ceil((a - start[k]) / h));
        auto hi = static_cast<std::int64_t>(std::floor((b - start[k]) / h));
        return std::pair{std::max<std::int64_t>(lo, 0), std::min<std::int64_t>(hi, per_axis - 1)};
    };

    std::array<std::int64_t, kMaxDim> first{}, last{}, cur{};
    for (std::size_t n = 0; n < path.size(); ++n) {
        const auto c = path.point(n);
        bool empty = false;
        for (std::size_t k = 1; k < d; ++k) {
            const double half = ball ? reach : K.half_widths()[k];
            std::tie(first[k], last[k]) = index_range(c[k] - half, c[k] + half, k);
            empty = empty || first[k] > last[k];
        }
        if (empty) continue;
        cur = first;
        while (true) {
            double residual = ball ? r2 : 0.0;
            std::uint64_t row = 0;
            std::uint64_t stride = 1;
            for (std::size_t k = 1; k < d; ++k) {
                if (ball) {
                    const double dy = start[k] + static_cast<double>(cur[k]) * h - c[k];
                    residual -= dy * dy;
                }
                row += static_cast<std::uint64_t>(cur[k]) * stride;
                stride *= static_cast<std::uint64_t>(per_axis);
            }
            if (residual >= 0.0) {
                const double half = ball ? std::sqrt(residual) : K.half_widths()[0];
                const auto [a, b] = index_range(c[0] - half, c[0] + half, 0);
                set_bits(bits.data() + row * words_per_row, a, b);
            }
            std::size_t k = 1;
            while (k < d && cur[k] == last[k]) {
                cur[k] = first[k];
                ++k;
            }
            if (k == d) break;
            ++cur[k];
        }
    }

    std::uint64_t count = 0;
    for (auto w : bits) count += static_cast<std::uint64_t>(std::popcount(w));
    return static_cast<double>(count) * std::pow(h, static_cast<double>(d));
}

bool sausage_contains_bruteforce(const Path& path, const CrossSection& K, std::span<const double> y) {
    const auto d = static_cast<std::size_t>(path.dimension());
    std::array<double, kMaxDim> rel{};
    for (std::size_t n = 0; n < path.size(); ++n) {
        const auto c = path.point(n);
        for (std::size_t k = 0; k < d; ++k) rel[k] = y[k] - c[k];
        if (K.contains({rel.data(), d})) return true;
    }
    return false;
}

}  // namespace sausage_lab
