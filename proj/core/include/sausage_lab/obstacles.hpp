#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "sausage_lab/field.hpp"
#include "sausage_lab/geometry.hpp"
#include "sausage_lab/sde.hpp"

namespace sausage_lab {

/// Largest expected obstacle count sample_obstacles will attempt.
inline constexpr double kMaxExpectedObstacles = 1e8;

/// Axis-aligned box [lo, hi].
struct Region {
    std::vector<double> lo;
    std::vector<double> hi;

    static Region cube(std::span<const double> center, double half_side);

    [[nodiscard]] int dimension() const noexcept { return static_cast<int>(lo.size()); }
    [[nodiscard]] double volume() const;
    /// x lies in the box shrunk by `margin` on every side.
    [[nodiscard]] bool contains(std::span<const double> x, double margin = 0.0) const;
};

/// Poisson point set P of intensity ρ inside a region, with the shape K
/// placed at every atom.
struct ObstacleField {
    double intensity_rho = 0.0;
    Region region;
    std::vector<double> points;  ///< point-major
    CrossSection cross_section = CrossSection::ball(1.0);
    std::uint64_t seed = 0;

    [[nodiscard]] std::size_t count() const noexcept {
        return region.lo.empty() ? 0 : points.size() / region.lo.size();
    }
};

/// Poisson(ρ·|region|) many i.i.d. uniform points; deterministic per seed.
/// Throws ResourceError when the expected count exceeds kMaxExpectedObstacles.
ObstacleField sample_obstacles(double rho, const Region& region, const CrossSection& K, std::uint64_t seed);

struct HittingResult {
    bool hit = false;
    std::optional<double> t_hit;
    std::size_t step = 0;  ///< grid index of the hit, or of the last inspected point
    double sigma = 1.0;
    std::optional<double> t_hit_rescaled;  ///< t_hit / σ²
    /// The path left the region where the obstacle field is complete before
    /// any hit; `step` marks the exit.
    bool boundary_censored = false;
};

/// Margin kept between the path and the region boundary: R_K plus `band`.
double safe_margin(const CrossSection& K, double band);

/// First grid time nΔt with X_n ∈ K + P.
HittingResult first_hitting_time(const Path& path, const ObstacleField& field, double sigma = 1.0,
                                 double safety_band = -1.0);

/// Fraction of `n_fields` independent obstacle fields (intensity ρ, on a cube
/// around the path) that the whole path avoids. The identity
/// E[1{T > t}] = exp(-ρ|S_t^K̂|) makes this an independent check of the
/// sausage volume.
struct SurvivalCount {
    std::size_t survived = 0;
    std::size_t trials = 0;
    [[nodiscard]] double fraction() const {
        return trials == 0 ? 0.0 : static_cast<double>(survived) / static_cast<double>(trials);
    }
};
SurvivalCount empirical_survival(const Path& path, const CrossSection& K, double rho, std::size_t n_fields,
                                 std::uint64_t seed, std::size_t workers = 0);

struct SurvivalParams {
    double sigma = 10.0;
    std::size_t n_paths = 100;
    std::size_t n_obstacle_fields = 1;
    /// Observation window in rescaled time units (real time σ²·horizon).
    double horizon = 1.0;
    double dt = kDefaultDt;
    std::uint64_t master_seed = 1;
    /// Gaussian-tail multiplier c in the region half-side margin + c·ε√T + |v|_∞·T.
    double tail_multiplier = 6.0;
    /// Overrides the region half-side when positive.
    double region_half_side = 0.0;
    double safety_band = -1.0;
    /// λ̄ used for the Kolmogorov-Smirnov reference; required.
    double lambda_bar_ref = 0.0;
    std::size_t workers = 0;
};

struct SurvivalTrial {
    std::uint64_t seed_path = 0;
    std::uint64_t seed_field = 0;
    bool hit = false;
    double t_hit = 0.0;  ///< rescaled; observation end for censored trials
    bool censored = false;  ///< no hit within the window, or boundary exit
    bool boundary = false;
};

struct SurvivalSummary {
    double sigma = 0.0;
    double lambda_hat = 0.0;
    double lambda_bar_ref = 0.0;
    double ks_distance = 0.0;
    std::size_t n_hits = 0;
    std::size_t n_censored = 0;
    std::size_t n_boundary = 0;
    double horizon = 0.0;
    double expected_obstacles = 0.0;
    std::string advisory;
    std::vector<SurvivalTrial> trials;
};

/// Rescaled hitting times T^(σ) = σ⁻²·inf{t : X_t ∈ K + P} for ρ = σ⁻²,
/// the censored-exponential MLE λ̂ = hits / observed time, and the KS
/// distance of the hit-time distribution to Exp(λ̄). Throws
/// InsufficientDataError with fewer than 30 hits.
SurvivalSummary survival_experiment(const VelocityField& field, double epsilon, const CrossSection& K,
                                    const SurvivalParams& params);

/// sup_{t ≤ window} |F_n(t) - (1 - e^{-λt})| with F_n counting hits only.
double ks_distance_exponential(const std::vector<SurvivalTrial>& trials, double lambda, double window);

/// Two-sample sup distance between the hit-time distributions on [0, window].
double ks_distance_two_sample(const std::vector<SurvivalTrial>& a, const std::vector<SurvivalTrial>& b,
                              double window);

/// Memorylessness check at (s, t): P(T > s+t)/P(T > s) against P(T > t).
struct MemorylessCheck {
    double conditional = 0.0;
    double unconditional = 0.0;
    double std_error = 0.0;  ///< of the difference
    [[nodiscard]] bool within(double n_sigma) const {
        return std::abs(conditional - unconditional) <= n_sigma * std_error;
    }
};
MemorylessCheck memoryless_check(const std::vector<SurvivalTrial>& trials, double s, double t);

}  // namespace sausage_lab
