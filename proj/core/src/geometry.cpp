#include "sausage_lab/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "sausage_lab/error.hpp"

namespace sausage_lab {
namespace {

constexpr std::uint64_t kDenseCellLimit = 1u << 22;

double unit_ball_volume(int d) {
    return std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0 + 1.0);
}

}  // namespace

CrossSection CrossSection::ball(double radius, int dimension) {
    if (!(radius > 0.0) || !std::isfinite(radius)) throw ConfigError("ball radius must be positive");
    if (dimension < 1 || dimension > kMaxDim) throw ConfigError("bad cross-section dimension");
    CrossSection k;
    k.shape_ = Shape::Ball;
    k.dim_ = dimension;
    k.radius_ = radius;
    return k;
}

CrossSection CrossSection::box(std::vector<double> half_widths) {
    if (half_widths.empty() || half_widths.size() > static_cast<std::size_t>(kMaxDim)) {
        throw ConfigError("bad box dimension");
    }
    for (double h : half_widths) {
        if (!(h > 0.0) || !std::isfinite(h)) throw ConfigError("box half-widths must be positive");
    }
    CrossSection k;
    k.shape_ = Shape::Box;
    k.dim_ = static_cast<int>(half_widths.size());
    k.radius_ = *std::max_element(half_widths.begin(), half_widths.end());
    k.half_ = std::move(half_widths);
    return k;
}

CrossSection CrossSection::parse(const std::string& spec, int dimension) {
    const auto colon = spec.find(':');
    const std::string kind = spec.substr(0, colon);
    const std::string args = colon == std::string::npos ? "" : spec.substr(colon + 1);
    try {
        if (kind == "ball") return ball(args.empty() ? 1.0 : std::stod(args), dimension);
        if (kind == "box") {
            std::vector<double> h;
            std::stringstream ss(args);
            std::string item;
            while (std::getline(ss, item, ',')) h.push_back(std::stod(item));
            if (h.size() == 1) h.assign(static_cast<std::size_t>(dimension), h.front());
            return box(std::move(h));
        }
    } catch (const std::invalid_argument&) {
        throw ConfigError("bad cross-section '" + spec + "'");
    }
    throw ConfigError("unknown cross-section '" + spec + "' (expected ball:<r> or box:<h,...>)");
}

double CrossSection::coordinate_radius() const {
    // For the ball the extreme coordinate is attained on an axis.
    return radius_;
}

double CrossSection::euclidean_radius() const {
    if (shape_ == Shape::Ball) return radius_;
    double s = 0.0;
    for (double h : half_) s += h * h;
    return std::sqrt(s);
}

double CrossSection::volume() const {
    if (shape_ == Shape::Ball) return unit_ball_volume(dim_) * std::pow(radius_, dim_);
    double v = 1.0;
    for (double h : half_) v *= 2.0 * h;
    return v;
}

CrossSection CrossSection::reflected() const {
    // -B(0, r) = B(0, r) and -∏[-h, h] = ∏[-h, h].
    return *this;
}

bool CrossSection::contains(std::span<const double> y) const {
    const auto d = static_cast<std::size_t>(dim_);
    if (shape_ == Shape::Ball) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) s += y[k] * y[k];
        return s <= radius_ * radius_;
    }
    for (std::size_t k = 0; k < d; ++k) {
        if (std::abs(y[k]) > half_[k]) return false;
    }
    return true;
}

bool CrossSection::contains_cube(std::span<const double> center, std::span<const double> cube_center,
                                 double half) const {
    // K is convex, so the cube lies in K + c iff its farthest corner does.
    const auto d = static_cast<std::size_t>(dimension());
    if (shape_ == Shape::Ball) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double far = std::abs(cube_center[k] - center[k]) + half;
            s += far * far;
        }
        return s <= radius_ * radius_;
    }
    for (std::size_t k = 0; k < d; ++k) {
        if (std::abs(cube_center[k] - center[k]) + half > half_[k]) return false;
    }
    return true;
}

bool CrossSection::meets_cube(std::span<const double> center, std::span<const double> cube_center,
                              double half) const {
    const auto d = static_cast<std::size_t>(dim_);
    if (shape_ == Shape::Ball) {
        double s = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            const double gap = std::abs(center[k] - cube_center[k]) - half;
            if (gap > 0.0) s += gap * gap;
        }
        return s <= radius_ * radius_;
    }
    for (std::size_t k = 0; k < d; ++k) {
        if (std::abs(center[k] - cube_center[k]) > half + half_[k]) return false;
    }
    return true;
}

std::string CrossSection::describe() const {
    std::ostringstream out;
    out.precision(17);
    if (shape_ == Shape::Ball) {
        out << "ball:" << radius_;
    } else {
        out << "box:";
        for (std::size_t k = 0; k < half_.size(); ++k) out << (k ? "," : "") << half_[k];
    }
    return out.str();
}

PointIndex::PointIndex(std::span<const double> points, int dimension, const CrossSection& shape)
    : dim_(dimension), shape_(shape), cell_(shape.coordinate_radius() / 2.0) {
    if (dimension != shape.dimension()) throw ConfigError("cross-section dimension does not match points");
    const auto d = static_cast<std::size_t>(dim_);
    const std::size_t n = points.size() / d;
    if (n >= std::numeric_limits<std::uint32_t>::max()) throw ResourceError("too many points for index");
    if (n == 0) return;

    std::array<double, kMaxDim> lo{}, hi{};
    lo.fill(std::numeric_limits<double>::infinity());
    hi.fill(-std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            lo[k] = std::min(lo[k], points[i * d + k]);
            hi[k] = std::max(hi[k], points[i * d + k]);
        }
    }
    std::uint64_t total = 1;
    for (std::size_t k = 0; k < d; ++k) {
        origin_[k] = lo[k];
        extent_[k] = static_cast<std::int64_t>(std::floor((hi[k] - lo[k]) / cell_)) + 1;
        stride_[k] = total;
        if (static_cast<double>(total) * static_cast<double>(extent_[k]) > 0x1.0p62) {
            throw ResourceError("point set too spread out for the grid index");
        }
        total *= static_cast<std::uint64_t>(extent_[k]);
    }

    std::vector<std::uint64_t> keys(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::uint64_t key = 0;
        for (std::size_t k = 0; k < d; ++k) {
            key += static_cast<std::uint64_t>(cell_coord(points[i * d + k], k)) * stride_[k];
        }
        keys[i] = key;
    }
    order_.resize(n);
    std::iota(order_.begin(), order_.end(), 0u);
    std::stable_sort(order_.begin(), order_.end(), [&](std::uint32_t a, std::uint32_t b) { return keys[a] < keys[b]; });

    sorted_.resize(n * d);
    for (std::size_t i = 0; i < n; ++i) {
        std::copy_n(points.begin() + static_cast<std::ptrdiff_t>(order_[i] * d), d, sorted_.begin() + static_cast<std::ptrdiff_t>(i * d));
    }

    const bool dense = total <= kDenseCellLimit;
    if (dense) dense_.assign(total, Range{0, 0});
    std::size_t i = 0;
    while (i < n) {
        const std::uint64_t key = keys[order_[i]];
        std::size_t j = i;
        while (j < n && keys[order_[j]] == key) ++j;
        const Range range{static_cast<std::uint32_t>(i), static_cast<std::uint32_t>(j)};
        if (dense) {
            dense_[key] = range;
        } else {
            sparse_.emplace(key, range);
        }
        i = j;
    }
}

std::int64_t PointIndex::cell_coord(double x, std::size_t k) const {
    const auto c = static_cast<std::int64_t>(std::floor((x - origin_[k]) / cell_));
    return std::clamp<std::int64_t>(c, 0, extent_[k] - 1);
}

const PointIndex::Range* PointIndex::find(std::uint64_t key) const {
    if (!dense_.empty()) {
        const Range& r = dense_[key];
        return r.begin == r.end ? nullptr : &r;
    }
    const auto it = sparse_.find(key);
    return it == sparse_.end() ? nullptr : &it->second;
}

template <typename Classify, typename Visit>
bool PointIndex::visit_cells(std::span<const double> lo, std::span<const double> hi, Classify&& classify,
                             Visit&& visit) const {
    if (order_.empty()) return false;
    const auto d = static_cast<std::size_t>(dim_);
    std::array<std::int64_t, kMaxDim> first{}, last{}, cur{};
    for (std::size_t k = 0; k < d; ++k) {
        const double a = std::floor((lo[k] - origin_[k]) / cell_);
        const double b = std::floor((hi[k] - origin_[k]) / cell_);
        if (b < 0.0 || a > static_cast<double>(extent_[k] - 1)) return false;
        first[k] = std::max<std::int64_t>(0, static_cast<std::int64_t>(a));
        last[k] = std::min<std::int64_t>(extent_[k] - 1, static_cast<std::int64_t>(b));
    }
    // Scans are deferred so that an occupied Whole cell anywhere in the
    // window answers before any point is inspected.
    std::array<const Range*, 128> pending{};
    std::size_t n_pending = 0;
    auto scan = [&](const Range* r) {
        for (std::uint32_t i = r->begin; i < r->end; ++i) {
            if (visit(std::span<const double>(sorted_.data() + i * d, d), i)) return true;
        }
        return false;
    };
    cur = first;
    while (true) {
        std::uint64_t key = 0;
        for (std::size_t k = 0; k < d; ++k) key += static_cast<std::uint64_t>(cur[k]) * stride_[k];
        if (const Range* r = find(key)) {
            const CellVisit how = classify(cur);
            if (how == CellVisit::Whole) return true;
            if (how == CellVisit::Scan) {
                if (n_pending == pending.size()) {
                    if (scan(r)) return true;
                } else {
                    pending[n_pending++] = r;
                }
            }
        }
        std::size_t k = 0;
        while (k < d && cur[k] == last[k]) {
            cur[k] = first[k];
            ++k;
        }
        if (k == d) break;
        ++cur[k];
    }
    for (std::size_t i = 0; i < n_pending; ++i) {
        if (scan(pending[i])) return true;
    }
    return false;
}

PointIndex::CellVisit PointIndex::classify_cell(std::span<const double> q,
                                                const std::array<std::int64_t, kMaxDim>& cell) const {
    // c covers q iff |q - c| lies in K; compare the nearest and farthest
    // points of the cell box against K. The far test is padded so a point
    // rounded into a neighbouring cell never counts as covered.
    const auto d = static_cast<std::size_t>(dim_);
    const double pad = 1e-9 * cell_;
    double near2 = 0.0, far2 = 0.0;
    bool whole = true;
    for (std::size_t k = 0; k < d; ++k) {
        const double lo = origin_[k] + static_cast<double>(cell[k]) * cell_;
        const double gap = std::max({lo - q[k], q[k] - (lo + cell_), 0.0});
        const double far = std::max(std::abs(q[k] - lo), std::abs(q[k] - lo - cell_)) + pad;
        if (shape_.shape() == CrossSection::Shape::Ball) {
            near2 += gap * gap;
            far2 += far * far;
        } else {
            const double h = shape_.half_widths()[k];
            if (gap > h) return CellVisit::Skip;
            whole = whole && far <= h;
        }
    }
    if (shape_.shape() == CrossSection::Shape::Ball) {
        const double r2 = shape_.radius() * shape_.radius();
        if (near2 > r2) return CellVisit::Skip;
        return far2 <= r2 ? CellVisit::Whole : CellVisit::Scan;
    }
    return whole ? CellVisit::Whole : CellVisit::Scan;
}

bool PointIndex::covers(std::span<const double> q) const {
    const auto d = static_cast<std::size_t>(dim_);
    const double reach = shape_.coordinate_radius();
    std::array<double, kMaxDim> lo{}, hi{}, y{};
    for (std::size_t k = 0; k < d; ++k) {
        lo[k] = q[k] - reach;
        hi[k] = q[k] + reach;
    }
    auto classify = [&](const std::array<std::int64_t, kMaxDim>& cell) { return classify_cell(q, cell); };
    return visit_cells({lo.data(), d}, {hi.data(), d}, classify, [&](std::span<const double> c, std::uint32_t) {
        for (std::size_t k = 0; k < d; ++k) y[k] = q[k] - c[k];
        return shape_.contains({y.data(), d});
    });
}

std::size_t PointIndex::first_covering(std::span<const double> q) const {
    const auto d = static_cast<std::size_t>(dim_);
    const double reach = shape_.coordinate_radius();
    std::array<double, kMaxDim> lo{}, hi{}, y{};
    for (std::size_t k = 0; k < d; ++k) {
        lo[k] = q[k] - reach;
        hi[k] = q[k] + reach;
    }
    std::size_t best = npos;
    // Whole cells still need scanning: the smallest index is wanted.
    auto classify = [&](const std::array<std::int64_t, kMaxDim>& cell) {
        const CellVisit how = classify_cell(q, cell);
        return how == CellVisit::Whole ? CellVisit::Scan : how;
    };
    visit_cells({lo.data(), d}, {hi.data(), d}, classify, [&](std::span<const double> c, std::uint32_t i) {
        for (std::size_t k = 0; k < d; ++k) y[k] = q[k] - c[k];
        if (shape_.contains({y.data(), d})) best = std::min<std::size_t>(best, order_[i]);
        return false;
    });
    return best;
}

bool PointIndex::meets_cube(std::span<const double> cube_center, double half) const {
    const auto d = static_cast<std::size_t>(dim_);
    const double reach = half + shape_.coordinate_radius();
    std::array<double, kMaxDim> lo{}, hi{};
    for (std::size_t k = 0; k < d; ++k) {
        lo[k] = cube_center[k] - reach;
        hi[k] = cube_center[k] + reach;
    }
    auto keep_all = [](const std::array<std::int64_t, kMaxDim>&) { return CellVisit::Scan; };
    return visit_cells({lo.data(), d}, {hi.data(), d}, keep_all, [&](std::span<const double> c, std::uint32_t) {
        return shape_.meets_cube(c, cube_center, half);
    });
}

bool PointIndex::contains_cube(std::span<const double> cube_center, double half) const {
    const auto d = static_cast<std::size_t>(dim_);
    // The centre c of a translate holding the cube is within R_K - half of
    // the cube centre along every axis.
    const double reach = shape_.coordinate_radius() - half;
    if (reach < 0.0) return false;
    std::array<double, kMaxDim> lo{}, hi{};
    for (std::size_t k = 0; k < d; ++k) {
        lo[k] = cube_center[k] - reach;
        hi[k] = cube_center[k] + reach;
    }
    auto keep_all = [](const std::array<std::int64_t, kMaxDim>&) { return CellVisit::Scan; };
    return visit_cells({lo.data(), d}, {hi.data(), d}, keep_all, [&](std::span<const double> c, std::uint32_t) {
        return shape_.contains_cube(c, cube_center, half);
    });
}

}  // namespace sausage_lab
