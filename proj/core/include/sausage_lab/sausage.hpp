#pragma once

#include <cstdint>
#include <vector>

#include "sausage_lab/geometry.hpp"
#include "sausage_lab/sde.hpp"

namespace sausage_lab {

/// Default octree depth and samples per retained sub-cube.
inline constexpr int kDefaultDepth = 4;
inline constexpr std::size_t kDefaultSamples = 10000;

/// Largest voxel count the brute-force oracle will allocate.
inline constexpr std::uint64_t kMaxOracleVoxels = 1ull << 31;

struct BoundingCube {
    std::vector<double> center;
    double side = 0.0;
};

/// Sub-cubes of side `side` that meet the discrete sausage.
struct CellCover {
    BoundingCube cube;
    int depth = 0;
    double side = 0.0;
    std::vector<double> centers;  ///< point-major, one entry per retained cube

    [[nodiscard]] std::size_t count() const noexcept {
        return cube.center.empty() ? 0 : centers.size() / cube.center.size();
    }
    /// I · side^d.
    [[nodiscard]] double covered_volume() const;
};

struct SausageEstimate {
    double v_hat = 0.0;
    double T = 0.0;
    double gamma_hat = 0.0;
    int m = 0;
    std::size_t J = 0;
    std::size_t I = 0;
    double L = 0.0;
    double std_error = 0.0;
    std::uint64_t seed = 0;
    std::uint64_t hits = 0;
};

/// Cube centred at the start point with side L = 2(R_K + R_{X,T}).
BoundingCube bounding_cube(const Path& path, const CrossSection& K);

/// Octree subdivision to depth m, discarding sub-cubes that miss the sausage.
CellCover refine_cells(const Path& path, const CrossSection& K, int m);
CellCover refine_cells(const Path& path, const PointIndex& index, const CrossSection& K, int m);

/// The J shared offsets U_j, uniform in [-1/2, 1/2]^d, point-major.
std::vector<double> sample_offsets(std::size_t J, int dimension, std::uint64_t seed);

/// Octree-plus-sampling estimate of the sausage volume |∪_n (K + X_n)|.
/// Hit counts are integers reduced in a fixed order, so the result does not
/// depend on `workers` (0 selects resolve_workers()).
SausageEstimate estimate_volume(const Path& path, const CrossSection& K, int m, std::size_t J,
                                std::uint64_t seed, std::size_t workers = 1);

/// Voxel brute force: counts voxels of side L/2^resolution (over the
/// bounding cube) whose centres lie in the sausage. Throws ResourceError when
/// the grid would exceed kMaxOracleVoxels.
double voxel_oracle_volume(const Path& path, const CrossSection& K, int resolution);

/// Linear-scan membership test; reference for the indexed query.
bool sausage_contains_bruteforce(const Path& path, const CrossSection& K, std::span<const double> y);

}  // namespace sausage_lab
