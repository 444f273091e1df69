#include "sausage_lab/field.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sausage_lab/error.hpp"
#include "sausage_lab/rng.hpp"

namespace sausage_lab {
namespace {

constexpr double kDivergenceStep = 1e-4;
constexpr double kDivergenceTolerance = 1e-3;
constexpr double kMeanTolerance = 1e-3;
constexpr std::size_t kDivergenceSamples = 10000;
constexpr std::size_t kMeanNodes = 100000;

void check_dimension(int d) {
    if (d < 1 || d > kMaxDim) {
        throw ConfigError("field dimension " + std::to_string(d) + " outside [1, " +
                          std::to_string(kMaxDim) + "]");
    }
}

// Radical inverse in base `b`; building block of the Halton sequence.
double radical_inverse(std::uint64_t i, std::uint64_t b) {
    double inv = 1.0 / static_cast<double>(b);
    double f = inv;
    double r = 0.0;
    while (i > 0) {
        r += f * static_cast<double>(i % b);
        i /= b;
        f *= inv;
    }
    return r;
}

constexpr std::array<std::uint64_t, kMaxDim> kPrimes{2, 3, 5, 7, 11, 13, 17, 19};

}  // namespace

VelocityField VelocityField::zero(int dimension) {
    check_dimension(dimension);
    VelocityField f;
    f.kind_ = FieldKind::Zero;
    f.dimension_ = dimension;
    f.id_ = dimension == 3 ? "zero" : "zero:" + std::to_string(dimension);
    return f;
}

VelocityField VelocityField::taylor_green() {
    VelocityField f;
    f.kind_ = FieldKind::TaylorGreen;
    f.dimension_ = 3;
    f.period_ = 2.0 * std::numbers::pi;
    f.id_ = "taylor-green";
    return f;
}

VelocityField VelocityField::fourier(int dimension, double period, std::vector<FourierMode> modes) {
    check_dimension(dimension);
    if (!(period > 0.0) || !std::isfinite(period)) {
        throw ConfigError("fourier field: period must be positive");
    }
    const auto d = static_cast<std::size_t>(dimension);
    for (std::size_t i = 0; i < modes.size(); ++i) {
        auto& m = modes[i];
        if (m.cos_amp.empty()) m.cos_amp.assign(d, 0.0);
        if (m.sin_amp.empty()) m.sin_amp.assign(d, 0.0);
        if (m.wave.size() != d || m.cos_amp.size() != d || m.sin_amp.size() != d) {
            throw ConfigError("fourier field: mode " + std::to_string(i) + " has wrong dimension");
        }
    }
    VelocityField f;
    f.kind_ = FieldKind::Custom;
    f.dimension_ = dimension;
    f.period_ = period;
    f.id_ = "fourier";
    f.modes_ = std::make_shared<const std::vector<FourierMode>>(std::move(modes));
    validate_field(f);
    return f;
}

VelocityField VelocityField::custom(int dimension, double period, FieldFunction fn, std::string name) {
    check_dimension(dimension);
    if (!fn) throw ConfigError("custom field: empty evaluation function");
    if (!(period > 0.0)) throw ConfigError("custom field: period must be positive");
    VelocityField f;
    f.kind_ = FieldKind::Custom;
    f.dimension_ = dimension;
    f.period_ = period;
    f.id_ = std::move(name);
    f.fn_ = std::make_shared<const FieldFunction>(std::move(fn));
    validate_field(f);
    return f;
}

VelocityField VelocityField::from_id(const std::string& id) {
    if (id == "zero") return zero(3);
    if (id.rfind("zero:", 0) == 0) {
        int d = 0;
        try {
            d = std::stoi(id.substr(5));
        } catch (const std::exception&) {
            throw ConfigError("bad field id '" + id + "'");
        }
        return zero(d);
    }
    if (id == "taylor-green") return taylor_green();
    if (id.rfind("custom:", 0) == 0) {
        auto f = load_fourier(id.substr(7));
        f.id_ = id;
        return f;
    }
    throw ConfigError("unknown field id '" + id + "' (expected zero, taylor-green or custom:<path>)");
}

VelocityField VelocityField::load_fourier(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open field file " + path.string());
    nlohmann::json j;
    try {
        in >> j;
        const int d = j.at("dimension").get<int>();
        const double period = j.value("period", 1.0);
        std::vector<FourierMode> modes;
        for (const auto& jm : j.at("modes")) {
            FourierMode m;
            m.wave = jm.at("k").get<std::vector<int>>();
            m.cos_amp = jm.value("cos", std::vector<double>{});
            m.sin_amp = jm.value("sin", std::vector<double>{});
            modes.push_back(std::move(m));
        }
        return fourier(d, period, std::move(modes));
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed field file " + path.string() + ": " + e.what());
    }
}

VelocityField VelocityField::scaled(double r) const {
    if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("scale r must be positive and finite");
    VelocityField f = *this;
    f.scale_ = r;
    return f;
}

VelocityField VelocityField::amplified(double factor) const {
    if (!std::isfinite(factor)) throw ConfigError("amplitude must be finite");
    VelocityField f = *this;
    f.amplitude_ = amplitude_ * factor;
    return f;
}

double VelocityField::max_speed() const {
    switch (kind_) {
        case FieldKind::Zero:
            return 0.0;
        case FieldKind::TaylorGreen:
            // |v|² = sin²x1 cos²x2 + cos²x1 sin²x2 ≤ 1.
            return std::abs(amplitude_) * scale_;
        case FieldKind::Custom:
            break;
    }
    if (modes_) {
        double bound = 0.0;
        for (const auto& m : *modes_) {
            double c = 0.0, s = 0.0;
            for (int k = 0; k < dimension_; ++k) {
                c += m.cos_amp[k] * m.cos_amp[k];
                s += m.sin_amp[k] * m.sin_amp[k];
            }
            bound += std::sqrt(c) + std::sqrt(s);
        }
        return std::abs(amplitude_) * scale_ * bound;
    }
    // Opaque function: sample a Halton grid and pad generously.
    double best = 0.0;
    Scratch x{}, v{};
    const auto d = static_cast<std::size_t>(dimension_);
    for (std::uint64_t i = 1; i <= 4096; ++i) {
        for (std::size_t k = 0; k < d; ++k) x[k] = period_ * radical_inverse(i, kPrimes[k]);
        eval_base({x.data(), d}, {v.data(), d});
        double n2 = 0.0;
        for (std::size_t k = 0; k < d; ++k) n2 += v[k] * v[k];
        best = std::max(best, std::sqrt(n2));
    }
    return 1.5 * best * scale_;
}

bool VelocityField::drift_confined_to_plane() const {
    switch (kind_) {
        case FieldKind::Zero:
        case FieldKind::TaylorGreen:
            return true;
        case FieldKind::Custom:
            break;
    }
    if (modes_) {
        const auto last = static_cast<std::size_t>(dimension_ - 1);
        return std::all_of(modes_->begin(), modes_->end(), [last](const FourierMode& m) {
            return m.cos_amp[last] == 0.0 && m.sin_amp[last] == 0.0;
        });
    }
    return false;
}

void VelocityField::eval_base(std::span<const double> x, std::span<double> out) const {
    const auto d = static_cast<std::size_t>(dimension_);
    switch (kind_) {
        case FieldKind::Zero:
            std::fill_n(out.begin(), d, 0.0);
            return;
        case FieldKind::TaylorGreen: {
            const double s1 = std::sin(x[0]), c1 = std::cos(x[0]);
            const double s2 = std::sin(x[1]), c2 = std::cos(x[1]);
            out[0] = -amplitude_ * s1 * c2;
            out[1] = amplitude_ * c1 * s2;
            out[2] = 0.0;
            return;
        }
        case FieldKind::Custom:
            break;
    }
    if (fn_) {
        (*fn_)(x.first(d), out.first(d));
        if (amplitude_ != 1.0) {
            for (std::size_t k = 0; k < d; ++k) out[k] *= amplitude_;
        }
        return;
    }
    std::fill_n(out.begin(), d, 0.0);
    const double w = 2.0 * std::numbers::pi / period_;
    for (const auto& m : *modes_) {
        double phase = 0.0;
        for (std::size_t k = 0; k < d; ++k) phase += m.wave[k] * x[k];
        phase *= w;
        const double c = std::cos(phase), s = std::sin(phase);
        for (std::size_t k = 0; k < d; ++k) out[k] += m.cos_amp[k] * c + m.sin_amp[k] * s;
    }
    if (amplitude_ != 1.0) {
        for (std::size_t k = 0; k < d; ++k) out[k] *= amplitude_;
    }
}

void VelocityField::eval(std::span<const double> x, std::span<double> out) const {
    if (scale_ == 1.0) {
        eval_base(x, out);
        return;
    }
    const auto d = static_cast<std::size_t>(dimension_);
    Scratch y{};
    for (std::size_t k = 0; k < d; ++k) y[k] = scale_ * x[k];
    eval_base({y.data(), d}, out);
    for (std::size_t k = 0; k < d; ++k) out[k] *= scale_;
}

std::array<double, 3> eval_taylor_green(std::span<const double> x) {
    if (x.size() != 3) {
        throw ConfigError("taylor-green field requires dimension 3, got " + std::to_string(x.size()));
    }
    std::array<double, 3> v{};
    VelocityField::taylor_green().eval_base(x, v);
    return v;
}

std::vector<double> eval_scaled(const VelocityField& field, std::span<const double> x) {
    if (x.size() != static_cast<std::size_t>(field.dimension())) {
        throw ConfigError("position dimension does not match field dimension");
    }
    std::vector<double> v(x.size());
    field.eval(x, v);
    return v;
}

double check_divergence_free(const VelocityField& field, std::size_t samples, double h, std::uint64_t seed) {
    if (!(h > 0.0)) throw ConfigError("divergence step h must be positive");
    const auto d = static_cast<std::size_t>(field.dimension());
    const rng::Philox gen(seed, rng::Stream::Validation);
    const double period = field.period();
    double worst = 0.0;
    Scratch x{}, xp{}, vp{}, vm{};
    for (std::size_t i = 0; i < samples; ++i) {
        for (std::size_t k = 0; k < d; k += 2) {
            const auto u = gen.uniforms(i, static_cast<std::uint32_t>(k / 2));
            x[k] = period * u[0];
            if (k + 1 < d) x[k + 1] = period * u[1];
        }
        double div = 0.0;
        for (std::size_t k = 0; k < d; ++k) {
            xp = x;
            xp[k] = x[k] + h;
            field.eval_base({xp.data(), d}, {vp.data(), d});
            xp[k] = x[k] - h;
            field.eval_base({xp.data(), d}, {vm.data(), d});
            div += (vp[k] - vm[k]) / (2.0 * h);
        }
        worst = std::max(worst, std::abs(div));
    }
    return worst;
}

std::vector<double> cell_mean(const VelocityField& field, std::size_t nodes) {
    const auto d = static_cast<std::size_t>(field.dimension());
    std::vector<double> sum(d, 0.0);
    Scratch x{}, v{};
    for (std::size_t i = 1; i <= nodes; ++i) {
        for (std::size_t k = 0; k < d; ++k) x[k] = field.period() * radical_inverse(i, kPrimes[k]);
        field.eval_base({x.data(), d}, {v.data(), d});
        for (std::size_t k = 0; k < d; ++k) sum[k] += v[k];
    }
    for (auto& s : sum) s /= static_cast<double>(nodes);
    return sum;
}

FieldReport inspect_field(const VelocityField& field) {
    FieldReport rep;
    rep.max_divergence = check_divergence_free(field, kDivergenceSamples, kDivergenceStep);
    const auto mean = cell_mean(field, kMeanNodes);
    double n2 = 0.0;
    for (double m : mean) n2 += m * m;
    rep.mean_norm = std::sqrt(n2);
    rep.ok = rep.max_divergence <= kDivergenceTolerance && rep.mean_norm <= kMeanTolerance;
    return rep;
}

void validate_field(const VelocityField& field) {
    const FieldReport rep = inspect_field(field);
    if (rep.ok) return;
    std::ostringstream msg;
    msg << "field '" << field.id() << "' rejected:";
    if (rep.max_divergence > kDivergenceTolerance) {
        msg << " max central-difference divergence " << rep.max_divergence << " > " << kDivergenceTolerance;
    }
    if (rep.mean_norm > kMeanTolerance) {
        msg << " cell mean norm " << rep.mean_norm << " > " << kMeanTolerance;
    }
    throw ConfigError(msg.str());
}

}  // namespace sausage_lab
