#include "sausage_lab/rates.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "sausage_lab/error.hpp"
#include "sausage_lab/parallel.hpp"
#include "sausage_lab/rng.hpp"
#include "sausage_lab/sde.hpp"

namespace sausage_lab {
namespace {

std::size_t steps_for(double T, double dt) {
    return static_cast<std::size_t>(std::llround(T / dt));
}

std::vector<double> start_point(const std::vector<double>& x0, int dimension) {
    if (x0.empty()) return std::vector<double>(static_cast<std::size_t>(dimension), 0.0);
    if (x0.size() != static_cast<std::size_t>(dimension)) throw ConfigError("x0 dimension does not match");
    return x0;
}

std::pair<double, double> mean_and_error(const std::vector<double>& values) {
    const auto n = static_cast<double>(values.size());
    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= n;
    if (values.size() < 2) return {mean, 0.0};
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    return {mean, std::sqrt(ss / (n - 1.0) / n)};
}

// Runs `body` for each realization, wrapping library errors with the index.
template <typename Body>
void for_each_realization(std::size_t n, std::size_t workers, Body&& body) {
    parallel_for(n, resolve_workers(workers), [&](std::size_t i) {
        try {
            body(i);
        } catch (const RealizationError&) {
            throw;
        } catch (const Error& e) {
            throw RealizationError(i, e.kind(), e.what());
        }
    });
}

}  // namespace

void GrowthRateParams::validate() const {
    if (!(T >= kMinGrowthHorizon)) throw ConfigError("growth-rate horizon T must be >= 100");
    if (!(dt > 0.0) || dt > kMaxDt) throw ConfigError("dt must be in (0, 0.1]");
    if (m < 0) throw ConfigError("m must be >= 0");
    if (J < 1) throw ConfigError("J must be >= 1");
    if (n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
    if (substeps < 1) throw ConfigError("substeps must be >= 1");
}

RealizationSeeds realization_seeds(std::uint64_t master_seed, std::size_t index) {
    const std::uint64_t base = rng::derive_seed(master_seed, index);
    return {rng::derive_seed(base, 0), rng::derive_seed(base, 1)};
}

GrowthRateResult estimate_growth_rate(const VelocityField& field, double epsilon, const CrossSection& K,
                                      const GrowthRateParams& params) {
    params.validate();
    if (K.dimension() != field.dimension()) throw ConfigError("cross-section and field dimensions differ");

    IntegratorConfig cfg;
    cfg.epsilon = epsilon;
    cfg.dt = params.dt / static_cast<double>(params.substeps);
    cfg.n_steps = steps_for(params.T, params.dt) * params.substeps;
    cfg.record_stride = params.substeps;
    cfg.x0 = start_point(params.x0, field.dimension());
    cfg.validate();

    std::vector<double> rates(params.n_realizations, 0.0);
    for_each_realization(params.n_realizations, params.workers, [&](std::size_t i) {
        const auto seeds = realization_seeds(params.master_seed, i);
        IntegratorConfig local = cfg;
        local.seed = seeds.path;
        const Path path = integrate(field, local);
        rates[i] = estimate_volume(path, K, params.m, params.J, seeds.sampling, 1).gamma_hat;
    });

    GrowthRateResult out;
    std::tie(out.gamma_hat, out.std_error) = mean_and_error(rates);
    out.epsilon = epsilon;
    out.scale_r = field.scale();
    out.cross_section = K;
    out.T = cfg.horizon();
    out.dt = cfg.dt;
    out.m = params.m;
    out.J = params.J;
    out.n_realizations = params.n_realizations;
    out.master_seed = params.master_seed;
    out.per_realization = std::move(rates);
    return out;
}

double capacity_ball(double radius, int dimension) {
    if (dimension < 3) throw DomainError("Newtonian capacity is defined for d >= 3");
    if (!(radius > 0.0)) throw DomainError("radius must be positive");
    const double d = dimension;
    const double sphere_area = 2.0 * std::pow(std::numbers::pi, d / 2.0) / std::tgamma(d / 2.0);
    return 0.5 * (d - 2.0) * sphere_area * std::pow(radius, d - 2.0);
}

AnisotropicCapacityResult capacity_anisotropic(const Eigen::MatrixXd& a_bar, const CrossSection& K,
                                               const GrowthRateParams& params) {
    params.validate();
    const auto d = a_bar.rows();
    if (a_bar.cols() != d || d != K.dimension()) throw DomainError("ā must be a d x d matrix matching K");
    if (!a_bar.isApprox(a_bar.transpose(), 1e-12)) throw DomainError("ā is not symmetric");
    const Eigen::LLT<Eigen::MatrixXd> llt(a_bar);
    if (llt.info() != Eigen::Success) throw DomainError("ā is not positive-definite");

    IntegratorConfig cfg;
    cfg.epsilon = 1.0;
    cfg.dt = params.dt;
    cfg.n_steps = steps_for(params.T, params.dt);
    cfg.x0 = start_point(params.x0, static_cast<int>(d));

    AnisotropicCapacityResult out;
    out.per_realization.assign(params.n_realizations, 0.0);
    for_each_realization(params.n_realizations, params.workers, [&](std::size_t i) {
        const auto seeds = realization_seeds(params.master_seed, i);
        IntegratorConfig local = cfg;
        local.seed = seeds.path;
        const Path path = integrate_brownian(a_bar, local);
        out.per_realization[i] = estimate_volume(path, K, params.m, params.J, seeds.sampling, 1).gamma_hat;
    });
    std::tie(out.value, out.std_error) = mean_and_error(out.per_realization);

    const double c = a_bar(0, 0);
    const bool isotropic = a_bar.isApprox(c * Eigen::MatrixXd::Identity(d, d), 1e-12);
    if (isotropic && K.shape() == CrossSection::Shape::Ball && d >= 3) {
        // ā^{-1/2}B(0, R) = B(0, R/√c) and √det ā = c^{d/2}.
        out.closed_form = std::pow(c, d / 2.0) * capacity_ball(K.radius() / std::sqrt(c), static_cast<int>(d));
    }
    return out;
}

DiffusivityResult estimate_effective_diffusivity(const VelocityField& field, double epsilon,
                                                 const DiffusivityParams& params) {
    if (!(params.T > 0.0)) throw ConfigError("T must be positive");
    if (!(params.dt > 0.0) || params.dt > kMaxDt) throw ConfigError("dt must be in (0, 0.1]");
    if (params.n_realizations < 1) throw ConfigError("n_realizations must be >= 1");
    const int dim = field.dimension();
    const auto d = static_cast<std::size_t>(dim);
    const std::vector<double> x0 = start_point(params.x0, dim);
    const std::size_t n_steps = steps_for(params.T, params.dt);
    const double horizon = params.dt * static_cast<double>(n_steps);

    std::vector<double> displacement(params.n_realizations * d, 0.0);
    for_each_realization(params.n_realizations, params.workers, [&](std::size_t i) {
        EulerMaruyama em(field, epsilon, params.dt, x0, realization_seeds(params.master_seed, i).path);
        while (em.steps_taken() < n_steps) em.step();
        const auto x = em.position();
        for (std::size_t k = 0; k < d; ++k) displacement[i * d + k] = x[k] - x0[k];
    });

    DiffusivityResult out;
    out.epsilon = epsilon;
    out.T = horizon;
    out.dt = params.dt;
    out.n_realizations = params.n_realizations;
    out.displacement_moment = Eigen::MatrixXd::Zero(dim, dim);
    std::vector<double> first_axis(params.n_realizations);
    for (std::size_t i = 0; i < params.n_realizations; ++i) {
        const Eigen::Map<const Eigen::VectorXd> z(displacement.data() + i * d, dim);
        out.displacement_moment += z * z.transpose();
        first_axis[i] = z[0] * z[0] / horizon;
    }
    out.displacement_moment /= horizon * static_cast<double>(params.n_realizations);
    std::tie(out.alpha_hat, out.alpha_std_error) = mean_and_error(first_axis);

    out.drift_confined = field.drift_confined_to_plane();
    if (out.drift_confined) {
        out.a_bar = Eigen::MatrixXd::Zero(dim, dim);
        for (int k = 0; k + 1 < dim; ++k) out.a_bar(k, k) = out.alpha_hat;
        out.a_bar(dim - 1, dim - 1) = epsilon * epsilon / 2.0;
    } else {
        out.a_bar = out.displacement_moment;
    }
    return out;
}

std::size_t substeps_for_scale(double dt, double r, double unscaled_dt) {
    if (!(unscaled_dt > 0.0) || r <= 1.0) return 1;
    // v^(r) on step δ behaves like v on step r²δ.
    const double wanted = unscaled_dt / (r * r);
    return std::max<std::size_t>(1, static_cast<std::size_t>(std::ceil(dt / wanted)));
}

std::vector<SweepRow> sweep_r(const VelocityField& field, double epsilon, const CrossSection& K,
                              std::vector<double> r_values, const GrowthRateParams& params, double unscaled_dt) {
    if (r_values.empty()) throw ConfigError("r_values must be nonempty");
    for (double r : r_values) {
        if (!(r > 0.0) || !std::isfinite(r)) throw ConfigError("r values must be positive");
    }
    std::sort(r_values.begin(), r_values.end());
    std::vector<SweepRow> rows;
    rows.reserve(r_values.size());
    for (double r : r_values) {
        SweepRow row;
        row.r = r;
        try {
            GrowthRateParams p = params;
            p.substeps = params.substeps * substeps_for_scale(params.dt, r, unscaled_dt);
            row.result = estimate_growth_rate(field.scaled(r), epsilon, K, p);
        } catch (const Error& e) {
            row.error = std::string(e.kind()) + ": " + e.what();
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace sausage_lab
