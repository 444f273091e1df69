#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "sausage_lab/field.hpp"
#include "sausage_lab/rng.hpp"

namespace sausage_lab {

/// Default Euler-Maruyama step.
inline constexpr double kDefaultDt = 1e-2;
/// Largest accepted step; coarser grids are rejected as a configuration error.
inline constexpr double kMaxDt = 0.1;

struct IntegratorConfig {
    double epsilon = 0.25;
    double dt = kDefaultDt;
    std::size_t n_steps = 1000;
    std::vector<double> x0 = {0.0, 0.0, 0.0};
    std::uint64_t seed = 1;
    /// Keep every `record_stride`-th position; the Path grid is dt·record_stride.
    std::size_t record_stride = 1;

    [[nodiscard]] double horizon() const { return dt * static_cast<double>(n_steps); }

    /// Throws ConfigError on a non-positive or non-finite parameter.
    void validate() const;
};

/// A discretized trajectory stored point-major: coordinate k of point n is
/// at data()[n * dimension() + k]. Immutable once built.
class Path {
public:
    Path() = default;
    Path(int dimension, double dt, std::uint64_t seed, std::vector<double> positions);

    [[nodiscard]] int dimension() const noexcept { return dim_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::size_t size() const noexcept { return dim_ == 0 ? 0 : data_.size() / static_cast<std::size_t>(dim_); }
    [[nodiscard]] std::size_t steps() const noexcept { return size() == 0 ? 0 : size() - 1; }
    /// T = N·Δt.
    [[nodiscard]] double duration() const noexcept { return dt_ * static_cast<double>(steps()); }

    [[nodiscard]] std::span<const double> point(std::size_t n) const {
        return {data_.data() + n * static_cast<std::size_t>(dim_), static_cast<std::size_t>(dim_)};
    }
    [[nodiscard]] std::span<const double> start() const { return point(0); }
    [[nodiscard]] const std::vector<double>& data() const noexcept { return data_; }

    /// First `n_steps` steps (n_steps + 1 points).
    [[nodiscard]] Path prefix(std::size_t n_steps) const;
    [[nodiscard]] Path translated(std::span<const double> offset) const;
    [[nodiscard]] Path scaled(double factor) const;

private:
    int dim_ = 0;
    double dt_ = 0.0;
    std::uint64_t seed_ = 0;
    std::vector<double> data_;
};

/// Streaming Euler-Maruyama integrator for dX = ε dW + v(X) dt. Step n draws
/// its Gaussian increment from the keyed stream at counter n, so the k-th
/// step is the same whether produced by integrate() or by a streaming caller.
class EulerMaruyama {
public:
    EulerMaruyama(const VelocityField& field, double epsilon, double dt, std::span<const double> x0,
                  std::uint64_t seed);

    /// Advances one step; throws IntegrationDivergedError on a non-finite state.
    void step();

    [[nodiscard]] std::span<const double> position() const { return {x_.data(), dim_}; }
    [[nodiscard]] std::size_t steps_taken() const noexcept { return n_; }
    [[nodiscard]] double time() const noexcept { return dt_ * static_cast<double>(n_); }

private:
    const VelocityField* field_;
    std::size_t dim_;
    double dt_;
    double noise_scale_;
    rng::Philox noise_;
    std::size_t n_ = 0;
    Scratch x_{};
};

/// Euler-Maruyama path of dX = ε dW + v(X) dt.
Path integrate(const VelocityField& field, const IntegratorConfig& cfg);

/// Brownian motion with covariance rate `covariance` (increments have
/// covariance ε²·covariance·Δt). Throws DomainError unless positive-definite.
Path integrate_brownian(const Eigen::MatrixXd& covariance, const IntegratorConfig& cfg);

struct CoupledPaths {
    Path fast;  ///< X on grid Δt, run to r²·T
    Path slow;  ///< X^(r)_t = X_{r²t} / r on grid Δt, run to T
    bool exact = true;  ///< false when r² is not an integer (slow path interpolated)
};

/// X and its diffusive rescaling X^(r) built from one Gaussian stream.
/// `cfg` gives the slow-path horizon (n_steps·dt) and the fast path's start.
CoupledPaths integrate_coupled_pair(const VelocityField& field, const IntegratorConfig& cfg, double r);

/// Binary record: "SLPATH01", u32 d, u64 N, f64 dt, u64 seed, then the
/// N+1 values of coordinate 1, then coordinate 2, ...; little-endian.
void save_path(const Path& path, const std::filesystem::path& file);
Path load_path(const std::filesystem::path& file);

}  // namespace sausage_lab
