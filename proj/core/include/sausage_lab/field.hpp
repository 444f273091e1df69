#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

namespace sausage_lab {

/// Largest spatial dimension supported by the fixed-size scratch buffers.
inline constexpr int kMaxDim = 8;

using Scratch = std::array<double, kMaxDim>;

enum class FieldKind { Zero, TaylorGreen, Custom };

/// One term of a truncated Fourier series on the lattice period·Z^d:
/// cos_amp·cos(2π k·x/period) + sin_amp·sin(2π k·x/period).
struct FourierMode {
    std::vector<int> wave;
    std::vector<double> cos_amp;
    std::vector<double> sin_amp;
};

/// Base evaluation of a user-supplied field (position, out velocity).
using FieldFunction = std::function<void(std::span<const double>, std::span<double>)>;

/// Periodic, mean-zero, divergence-free drift, optionally rescaled as
/// v^(r)(x) = r·v(r·x) and multiplied by a constant amplitude.
///
/// Immutable after construction; evaluation is a pure function of position.
class VelocityField {
public:
    static VelocityField zero(int dimension = 3);

    /// (-sin x1 cos x2, cos x1 sin x2, 0); period 2π in x1, x2.
    static VelocityField taylor_green();

    /// Fourier-series field; validated on construction (throws ConfigError).
    static VelocityField fourier(int dimension, double period, std::vector<FourierMode> modes);

    /// Arbitrary user field declared periodic with `period`; validated on
    /// construction (throws ConfigError).
    static VelocityField custom(int dimension, double period, FieldFunction fn, std::string name = "custom");

    /// Parses "zero", "zero:<d>", "taylor-green" or "custom:<path-to-json>".
    static VelocityField from_id(const std::string& id);

    /// Reads the JSON Fourier-series description.
    static VelocityField load_fourier(const std::filesystem::path& path);

    /// Copy with scale_r replaced.
    [[nodiscard]] VelocityField scaled(double r) const;

    /// Copy with the base field multiplied by `factor`.
    [[nodiscard]] VelocityField amplified(double factor) const;

    [[nodiscard]] FieldKind kind() const noexcept { return kind_; }
    [[nodiscard]] int dimension() const noexcept { return dimension_; }
    [[nodiscard]] double scale() const noexcept { return scale_; }
    [[nodiscard]] double amplitude() const noexcept { return amplitude_; }
    /// Lattice period of the unscaled field in every periodic direction.
    [[nodiscard]] double period() const noexcept { return period_; }
    [[nodiscard]] const std::string& id() const noexcept { return id_; }

    /// Upper bound on sup |v^(r)| (Euclidean); exact for Zero and TaylorGreen.
    [[nodiscard]] double max_speed() const;

    /// True when the last velocity component vanishes identically.
    [[nodiscard]] bool drift_confined_to_plane() const;

    /// Unscaled field (amplitude applied, scale_r ignored).
    void eval_base(std::span<const double> x, std::span<double> out) const;

    /// scale_r · base(scale_r · x).
    void eval(std::span<const double> x, std::span<double> out) const;

private:
    VelocityField() = default;

    FieldKind kind_ = FieldKind::Zero;
    int dimension_ = 3;
    double scale_ = 1.0;
    double amplitude_ = 1.0;
    double period_ = 1.0;
    std::string id_ = "zero";
    std::shared_ptr<const std::vector<FourierMode>> modes_;
    std::shared_ptr<const FieldFunction> fn_;
};

/// The Taylor-Green vector field; throws ConfigError unless x has 3 entries.
std::array<double, 3> eval_taylor_green(std::span<const double> x);

/// Convenience wrapper around VelocityField::eval.
std::vector<double> eval_scaled(const VelocityField& field, std::span<const double> x);

/// Maximum central-difference divergence of the unscaled field over `samples`
/// uniform points of one period cell.
double check_divergence_free(const VelocityField& field, std::size_t samples, double h,
                             std::uint64_t seed = 0x5eed);

/// Cell average of the unscaled field over a Halton point set.
std::vector<double> cell_mean(const VelocityField& field, std::size_t nodes = 100000);

/// Throws ConfigError when the divergence or the cell mean is out of tolerance.
void validate_field(const VelocityField& field);

struct FieldReport {
    double max_divergence = 0.0;
    double mean_norm = 0.0;
    bool ok = false;
};

/// Same checks as validate_field, returned instead of thrown.
FieldReport inspect_field(const VelocityField& field);

}  // namespace sausage_lab
