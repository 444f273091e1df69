#include "sausage_lab/sde.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include "sausage_lab/error.hpp"

namespace sausage_lab {
namespace {

constexpr char kPathMagic[8] = {'S', 'L', 'P', 'A', 'T', 'H', '0', '1'};

template <typename T>
void write_le(std::ostream& out, T value) {
    static_assert(std::is_trivially_copyable_v<T>);
    auto bytes = std::bit_cast<std::array<char, sizeof(T)>>(value);
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    out.write(bytes.data(), sizeof(T));
}

template <typename T>
T read_le(std::istream& in) {
    std::array<char, sizeof(T)> bytes{};
    in.read(bytes.data(), sizeof(T));
    if (!in) throw ConfigError("truncated path record");
    if constexpr (std::endian::native == std::endian::big) std::reverse(bytes.begin(), bytes.end());
    return std::bit_cast<T>(bytes);
}

void fill_noise(const rng::Philox& gen, std::uint64_t step, std::size_t dim, double* out) {
    for (std::size_t k = 0; k < dim; k += 4) {
        const auto z = gen.normals(step, static_cast<std::uint32_t>(k / 4));
        for (std::size_t j = 0; j < 4 && k + j < dim; ++j) out[k + j] = z[j];
    }
}

}  // namespace

void IntegratorConfig::validate() const {
    if (!(epsilon >= 0.0) || !std::isfinite(epsilon)) throw ConfigError("epsilon must be finite and >= 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
    if (dt > kMaxDt) throw ConfigError("dt must not exceed 0.1");
    if (n_steps < 1) throw ConfigError("n_steps must be >= 1");
    if (record_stride < 1) throw ConfigError("record_stride must be >= 1");
    if (x0.empty() || x0.size() > static_cast<std::size_t>(kMaxDim)) throw ConfigError("bad x0 dimension");
    for (double c : x0) {
        if (!std::isfinite(c)) throw ConfigError("x0 must be finite");
    }
}

Path::Path(int dimension, double dt, std::uint64_t seed, std::vector<double> positions)
    : dim_(dimension), dt_(dt), seed_(seed), data_(std::move(positions)) {
    if (dim_ < 1 || data_.size() % static_cast<std::size_t>(dim_) != 0) {
        throw ConfigError("path data size is not a multiple of the dimension");
    }
}

Path Path::prefix(std::size_t n_steps) const {
    const std::size_t n = std::min(n_steps + 1, size());
    return Path(dim_, dt_, seed_, {data_.begin(), data_.begin() + static_cast<std::ptrdiff_t>(n * static_cast<std::size_t>(dim_))});
}

Path Path::translated(std::span<const double> offset) const {
    std::vector<double> out = data_;
    const auto d = static_cast<std::size_t>(dim_);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += offset[i % d];
    return Path(dim_, dt_, seed_, std::move(out));
}

Path Path::scaled(double factor) const {
    std::vector<double> out = data_;
    for (double& c : out) c *= factor;
    return Path(dim_, dt_, seed_, std::move(out));
}

EulerMaruyama::EulerMaruyama(const VelocityField& field, double epsilon, double dt, std::span<const double> x0,
                             std::uint64_t seed)
    : field_(&field),
      dim_(x0.size()),
      dt_(dt),
      noise_scale_(epsilon * std::sqrt(dt)),
      noise_(seed, rng::Stream::PathNoise) {
    if (x0.size() != static_cast<std::size_t>(field.dimension())) {
        throw ConfigError("x0 has dimension " + std::to_string(x0.size()) + " but field has dimension " +
                          std::to_string(field.dimension()));
    }
    std::copy(x0.begin(), x0.end(), x_.begin());
}

void EulerMaruyama::step() {
    Scratch v{}, xi{};
    field_->eval({x_.data(), dim_}, {v.data(), dim_});
    fill_noise(noise_, n_, dim_, xi.data());
    bool finite = true;
    for (std::size_t k = 0; k < dim_; ++k) {
        x_[k] += v[k] * dt_ + noise_scale_ * xi[k];
        finite = finite && std::isfinite(x_[k]);
    }
    ++n_;
    if (!finite) {
        throw IntegrationDivergedError(n_, "non-finite position at step " + std::to_string(n_));
    }
}

Path integrate(const VelocityField& field, const IntegratorConfig& cfg) {
    cfg.validate();
    EulerMaruyama em(field, cfg.epsilon, cfg.dt, cfg.x0, cfg.seed);
    const std::size_t d = cfg.x0.size();
    const std::size_t points = cfg.n_steps / cfg.record_stride + 1;
    std::vector<double> data;
    data.reserve(points * d);
    data.insert(data.end(), cfg.x0.begin(), cfg.x0.end());
    const std::size_t total = (points - 1) * cfg.record_stride;
    while (em.steps_taken() < total) {
        em.step();
        if (em.steps_taken() % cfg.record_stride == 0) {
            const auto x = em.position();
            data.insert(data.end(), x.begin(), x.end());
        }
    }
    return Path(static_cast<int>(d), cfg.dt * static_cast<double>(cfg.record_stride), cfg.seed, std::move(data));
}

Path integrate_brownian(const Eigen::MatrixXd& covariance, const IntegratorConfig& cfg) {
    cfg.validate();
    const auto d = static_cast<Eigen::Index>(cfg.x0.size());
    if (covariance.rows() != d || covariance.cols() != d) {
        throw DomainError("covariance matrix must be " + std::to_string(d) + "x" + std::to_string(d));
    }
    if (!covariance.isApprox(covariance.transpose(), 1e-12)) throw DomainError("covariance matrix is not symmetric");
    const Eigen::LLT<Eigen::MatrixXd> llt(covariance);
    if (llt.info() != Eigen::Success) throw DomainError("covariance matrix is not positive-definite");
    const Eigen::MatrixXd factor = llt.matrixL();

    const rng::Philox noise(cfg.seed, rng::Stream::PathNoise);
    const double scale = cfg.epsilon * std::sqrt(cfg.dt);
    const std::size_t points = cfg.n_steps / cfg.record_stride + 1;
    std::vector<double> data;
    data.reserve(points * cfg.x0.size());
    data.insert(data.end(), cfg.x0.begin(), cfg.x0.end());

    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(cfg.x0.data(), d);
    Eigen::VectorXd xi(d);
    const std::size_t total = (points - 1) * cfg.record_stride;
    for (std::size_t n = 0; n < total; ++n) {
        fill_noise(noise, n, cfg.x0.size(), xi.data());
        x.noalias() += scale * (factor * xi);
        if ((n + 1) % cfg.record_stride == 0) data.insert(data.end(), x.data(), x.data() + d);
    }
    return Path(static_cast<int>(d), cfg.dt * static_cast<double>(cfg.record_stride), cfg.seed, std::move(data));
}

CoupledPaths integrate_coupled_pair(const VelocityField& field, const IntegratorConfig& cfg, double r) {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("coupling scale r must be positive");
    if (cfg.record_stride != 1) throw ConfigError("coupled integration requires record_stride = 1");
    cfg.validate();

    const double r2 = r * r;
    const double r2_rounded = std::round(r2);
    const bool exact = r2_rounded >= 1.0 && std::abs(r2 - r2_rounded) <= 1e-12 * r2;

    IntegratorConfig fast_cfg = cfg;
    fast_cfg.n_steps = exact ? cfg.n_steps * static_cast<std::size_t>(r2_rounded)
                             : static_cast<std::size_t>(std::ceil(static_cast<double>(cfg.n_steps) * r2));
    fast_cfg.n_steps = std::max<std::size_t>(fast_cfg.n_steps, 1);
    Path fast = integrate(field, fast_cfg);

    const std::size_t d = cfg.x0.size();
    std::vector<double> slow;
    slow.reserve((cfg.n_steps + 1) * d);
    const double inv_r = 1.0 / r;
    for (std::size_t n = 0; n <= cfg.n_steps; ++n) {
        if (exact) {
            const auto p = fast.point(n * static_cast<std::size_t>(r2_rounded));
            for (double c : p) slow.push_back(c * inv_r);
            continue;
        }
        const double s = static_cast<double>(n) * r2;
        const auto lo = std::min(static_cast<std::size_t>(std::floor(s)), fast.steps());
        const auto hi = std::min(lo + 1, fast.steps());
        const double w = s - static_cast<double>(lo);
        const auto a = fast.point(lo);
        const auto b = fast.point(hi);
        for (std::size_t k = 0; k < d; ++k) slow.push_back(((1.0 - w) * a[k] + w * b[k]) * inv_r);
    }
    return {std::move(fast), Path(static_cast<int>(d), cfg.dt, cfg.seed, std::move(slow)), exact};
}

void save_path(const Path& path, const std::filesystem::path& file) {
    std::ofstream out(file, std::ios::binary);
    if (!out) throw ResourceError("cannot write path file " + file.string());
    out.write(kPathMagic, sizeof(kPathMagic));
    write_le<std::uint32_t>(out, static_cast<std::uint32_t>(path.dimension()));
    write_le<std::uint64_t>(out, path.steps());
    write_le<double>(out, path.dt());
    write_le<std::uint64_t>(out, path.seed());
    const auto d = static_cast<std::size_t>(path.dimension());
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t n = 0; n < path.size(); ++n) write_le<double>(out, path.point(n)[k]);
    }
    if (!out) throw ResourceError("failed writing path file " + file.string());
}

Path load_path(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) throw ConfigError("cannot open path file " + file.string());
    char magic[sizeof(kPathMagic)];
    in.read(magic, sizeof(magic));
    if (!in || std::memcmp(magic, kPathMagic, sizeof(magic)) != 0) {
        throw ConfigError(file.string() + " is not a path record");
    }
    const auto d = read_le<std::uint32_t>(in);
    const auto n_steps = read_le<std::uint64_t>(in);
    const auto dt = read_le<double>(in);
    const auto seed = read_le<std::uint64_t>(in);
    if (d < 1 || d > static_cast<std::uint32_t>(kMaxDim)) throw ConfigError("path record has bad dimension");
    const std::size_t points = n_steps + 1;
    std::vector<double> data(points * d);
    for (std::size_t k = 0; k < d; ++k) {
        for (std::size_t n = 0; n < points; ++n) data[n * d + k] = read_le<double>(in);
    }
    return Path(static_cast<int>(d), dt, seed, std::move(data));
}

}  // namespace sausage_lab
