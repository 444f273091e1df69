#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "sausage_lab/field.hpp"
#include "sausage_lab/geometry.hpp"
#include "sausage_lab/sausage.hpp"

namespace sausage_lab {

/// Shortest horizon accepted by the growth-rate estimators.
inline constexpr double kMinGrowthHorizon = 100.0;

struct GrowthRateParams {
    double T = 1000.0;
    double dt = kDefaultDt;
    int m = kDefaultDepth;
    std::size_t J = 1000;
    std::size_t n_realizations = 20;
    std::uint64_t master_seed = 1;
    /// Integrate with dt / substeps but record the path on the dt grid.
    std::size_t substeps = 1;
    /// Start point; empty means the origin.
    std::vector<double> x0;
    std::size_t workers = 0;

    void validate() const;
};

struct GrowthRateResult {
    double gamma_hat = 0.0;
    double epsilon = 0.0;
    double scale_r = 1.0;
    CrossSection cross_section = CrossSection::ball(1.0);
    double T = 0.0;
    double dt = 0.0;  ///< integration step actually used
    int m = 0;
    std::size_t J = 0;
    std::size_t n_realizations = 0;
    std::uint64_t master_seed = 0;
    std::vector<double> per_realization;
    double std_error = 0.0;
};

/// Seeds of realization `index`: the path noise and the sampling offsets.
struct RealizationSeeds {
    std::uint64_t path;
    std::uint64_t sampling;
};
RealizationSeeds realization_seeds(std::uint64_t master_seed, std::size_t index);

/// Mean of |S_T|/T over independent Euler-Maruyama realizations of
/// dX = ε dW + v(X) dt, each measured with estimate_volume.
GrowthRateResult estimate_growth_rate(const VelocityField& field, double epsilon, const CrossSection& K,
                                      const GrowthRateParams& params);

/// Newtonian capacity of the ball of radius `radius` in R^d under the ½Δ
/// convention: (d-2)/2 · |S^{d-1}| · radius^{d-2}; 2π·radius for d = 3.
/// Throws DomainError for d < 3.
double capacity_ball(double radius, int dimension);

struct AnisotropicCapacityResult {
    double value = 0.0;
    double std_error = 0.0;
    std::vector<double> per_realization;
    /// √(det ā)·capp(ā^{-1/2}K), available when ā is a multiple of I and K is a ball.
    std::optional<double> closed_form;
};

/// Growth rate of the K-sausage of a Brownian motion whose increments have
/// covariance ā·Δt. Throws DomainError unless ā is symmetric positive-definite.
AnisotropicCapacityResult capacity_anisotropic(const Eigen::MatrixXd& a_bar, const CrossSection& K,
                                               const GrowthRateParams& params);

struct DiffusivityParams {
    double T = 1000.0;
    double dt = kDefaultDt;
    std::size_t n_realizations = 1000;
    std::uint64_t master_seed = 1;
    std::vector<double> x0;
    std::size_t workers = 0;
};

struct DiffusivityResult {
    double alpha_hat = 0.0;
    double alpha_std_error = 0.0;
    double epsilon = 0.0;
    double T = 0.0;
    double dt = 0.0;
    std::size_t n_realizations = 0;
    /// Mean of (X_T - x0)(X_T - x0)ᵀ / T.
    Eigen::MatrixXd displacement_moment;
    /// diag(α̂, ..., α̂, ε²/2) when the drift has no last component,
    /// otherwise the displacement moment matrix.
    Eigen::MatrixXd a_bar;
    bool drift_confined = false;
};

/// α̂ = mean over realizations of |X^1_T - x^1_0|²/T.
DiffusivityResult estimate_effective_diffusivity(const VelocityField& field, double epsilon,
                                                 const DiffusivityParams& params);

struct SweepRow {
    double r = 0.0;
    std::optional<GrowthRateResult> result;
    std::string error;
};

/// Integration step for scale r: the base dt, refined so the drift
/// v^(r) is integrated with an unscaled-equivalent step of at most
/// `unscaled_dt` (0 disables refinement). Returns the number of substeps.
std::size_t substeps_for_scale(double dt, double r, double unscaled_dt);

/// One growth-rate estimate per r, ordered by r. A failing row records its
/// error and the sweep continues.
std::vector<SweepRow> sweep_r(const VelocityField& field, double epsilon, const CrossSection& K,
                              std::vector<double> r_values, const GrowthRateParams& params,
                              double unscaled_dt = 0.0);

}  // namespace sausage_lab
