#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "sausage_lab/field.hpp"

namespace sausage_lab {

/// Compact set K swept along a path: a centred Euclidean ball or an
/// axis-aligned box given by its half-widths.
class CrossSection {
public:
    enum class Shape { Ball, Box };

    static CrossSection ball(double radius, int dimension = 3);
    static CrossSection box(std::vector<double> half_widths);
    /// "ball:<radius>" or "box:<h1>,<h2>,..."; dimension applies to balls.
    static CrossSection parse(const std::string& spec, int dimension = 3);

    [[nodiscard]] Shape shape() const noexcept { return shape_; }
    [[nodiscard]] int dimension() const noexcept { return dim_; }
    [[nodiscard]] double radius() const noexcept { return radius_; }
    [[nodiscard]] const std::vector<double>& half_widths() const noexcept { return half_; }

    /// R_K = max over y in K of max_k |y^k|.
    [[nodiscard]] double coordinate_radius() const;
    /// Smallest r with K inside the ball of radius r.
    [[nodiscard]] double euclidean_radius() const;
    [[nodiscard]] double volume() const;

    /// The reflection {-y : y in K}. Both supported shapes are centred and
    /// symmetric, so this equals *this; callers still route through it.
    [[nodiscard]] CrossSection reflected() const;

    /// Exact test y ∈ K (y relative to the centre of K).
    [[nodiscard]] bool contains(std::span<const double> y) const;

    /// Exact test (K + center) ∩ cube ≠ ∅ for the closed cube of half-side `half`.
    [[nodiscard]] bool meets_cube(std::span<const double> center, std::span<const double> cube_center,
                                  double half) const;

    /// Exact test cube ⊂ K + center.
    [[nodiscard]] bool contains_cube(std::span<const double> center, std::span<const double> cube_center,
                                     double half) const;

    [[nodiscard]] std::string describe() const;

    friend bool operator==(const CrossSection&, const CrossSection&) = default;

private:
    Shape shape_ = Shape::Ball;
    int dim_ = 3;
    double radius_ = 1.0;
    std::vector<double> half_;
};

/// Uniform-grid hash over a point set for the query "is some point c with
/// q - c ∈ K". Cells have side R_K/2, so a membership query inspects at most
/// 5^d cells. Cells out of reach of q are skipped, and an occupied cell lying
/// wholly within reach answers the query without a point scan.
class PointIndex {
public:
    PointIndex(std::span<const double> points, int dimension, const CrossSection& shape);

    /// Some stored point c has cube ⊂ K + c.
    [[nodiscard]] bool contains_cube(std::span<const double> cube_center, double half) const;

    /// Some stored point c has q - c ∈ K.
    [[nodiscard]] bool covers(std::span<const double> q) const;

    /// Some stored point c has (K + c) ∩ cube ≠ ∅.
    [[nodiscard]] bool meets_cube(std::span<const double> cube_center, double half) const;

    /// Smallest index of a stored point c with q - c ∈ K, or npos.
    [[nodiscard]] std::size_t first_covering(std::span<const double> q) const;

    [[nodiscard]] std::size_t size() const noexcept { return order_.size(); }
    [[nodiscard]] double cell_size() const noexcept { return cell_; }

    static constexpr std::size_t npos = static_cast<std::size_t>(-1);

private:
    struct Range {
        std::uint32_t begin;
        std::uint32_t end;
    };

    [[nodiscard]] std::int64_t cell_coord(double x, std::size_t k) const;
    [[nodiscard]] const Range* find(std::uint64_t key) const;

    enum class CellVisit { Skip, Whole, Scan };

    /// Skip: no point of the cell covers q. Whole: every point of it does.
    [[nodiscard]] CellVisit classify_cell(std::span<const double> q,
                                          const std::array<std::int64_t, kMaxDim>& cell) const;

    template <typename Classify, typename Visit>
    bool visit_cells(std::span<const double> lo, std::span<const double> hi, Classify&& classify,
                     Visit&& visit) const;

    int dim_;
    CrossSection shape_;
    double cell_;
    std::array<double, kMaxDim> origin_{};     // lower corner of cell (0, ..., 0)
    std::array<std::int64_t, kMaxDim> extent_{};
    std::array<std::uint64_t, kMaxDim> stride_{};
    std::vector<double> sorted_;               // points ordered by cell
    std::vector<std::uint32_t> order_;         // original index of sorted point i
    std::vector<Range> dense_;                 // used when the grid is small
    std::unordered_map<std::uint64_t, Range> sparse_;
};

}  // namespace sausage_lab
