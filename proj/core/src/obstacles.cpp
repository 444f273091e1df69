#include "sausage_lab/obstacles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sausage_lab/error.hpp"
#include "sausage_lab/parallel.hpp"
#include "sausage_lab/rng.hpp"
#include "sausage_lab/sausage.hpp"

namespace sausage_lab {
namespace {

constexpr std::size_t kMinHits = 30;

// Empirical P(T > t) over trials observed at least up to t.
double survival_at(const std::vector<SurvivalTrial>& trials, double t, std::size_t* at_risk = nullptr) {
    std::size_t alive = 0;
    std::size_t known = 0;
    for (const auto& tr : trials) {
        if (tr.hit) {
            ++known;
            if (tr.t_hit > t) ++alive;
        } else if (tr.t_hit >= t) {
            ++known;
            ++alive;
        }
    }
    if (at_risk) *at_risk = known;
    return known == 0 ? 0.0 : static_cast<double>(alive) / static_cast<double>(known);
}

std::vector<double> hit_times(const std::vector<SurvivalTrial>& trials) {
    std::vector<double> t;
    for (const auto& tr : trials) {
        if (tr.hit) t.push_back(tr.t_hit);
    }
    std::sort(t.begin(), t.end());
    return t;
}

}  // namespace

Region Region::cube(std::span<const double> center, double half_side) {
    Region r;
    for (double c : center) {
        r.lo.push_back(c - half_side);
        r.hi.push_back(c + half_side);
    }
    return r;
}

double Region::volume() const {
    double v = 1.0;
    for (std::size_t k = 0; k < lo.size(); ++k) v *= hi[k] - lo[k];
    return v;
}

bool Region::contains(std::span<const double> x, double margin) const {
    for (std::size_t k = 0; k < lo.size(); ++k) {
        if (x[k] < lo[k] + margin || x[k] > hi[k] - margin) return false;
    }
    return true;
}

ObstacleField sample_obstacles(double rho, const Region& region, const CrossSection& K, std::uint64_t seed) {
    if (!(rho > 0.0) || !std::isfinite(rho)) throw ConfigError("obstacle intensity must be positive");
    if (region.lo.empty() || region.lo.size() != region.hi.size()) throw ConfigError("malformed region");
    for (std::size_t k = 0; k < region.lo.size(); ++k) {
        if (!(region.hi[k] > region.lo[k])) throw ConfigError("degenerate obstacle region");
    }
    if (region.dimension() != K.dimension()) throw ConfigError("region and cross-section dimensions differ");
    const double mean = rho * region.volume();
    if (mean > kMaxExpectedObstacles) {
        throw ResourceError("expected obstacle count " + std::to_string(mean) + " exceeds 1e8");
    }

    rng::PhiloxEngine engine(seed, rng::Stream::Obstacles);
    std::poisson_distribution<std::uint64_t> count_dist(mean);
    const std::uint64_t count = count_dist(engine);

    ObstacleField field;
    field.intensity_rho = rho;
    field.region = region;
    field.cross_section = K;
    field.seed = seed;
    const auto d = region.lo.size();
    field.points.resize(count * d);
    for (std::uint64_t i = 0; i < count; ++i) {
        for (std::size_t k = 0; k < d; ++k) {
            field.points[i * d + k] = region.lo[k] + (region.hi[k] - region.lo[k]) * engine.uniform();
        }
    }
    return field;
}

double safe_margin(const CrossSection& K, double band) {
    return K.coordinate_radius() + (band < 0.0 ? K.coordinate_radius() : band);
}

HittingResult first_hitting_time(const Path& path, const ObstacleField& field, double sigma, double safety_band) {
    if (path.dimension() != field.region.dimension()) throw ConfigError("path and obstacle field dimensions differ");
    HittingResult res;
    res.sigma = sigma;
    const PointIndex index(field.points, path.dimension(), field.cross_section);
    const double margin = safe_margin(field.cross_section, safety_band);
    for (std::size_t n = 0; n < path.size(); ++n) {
        const auto x = path.point(n);
        res.step = n;
        if (index.covers(x)) {
            res.hit = true;
            res.t_hit = static_cast<double>(n) * path.dt();
            res.t_hit_rescaled = *res.t_hit / (sigma * sigma);
            return res;
        }
        if (!field.region.contains(x, margin)) {
            res.boundary_censored = true;
            return res;
        }
    }
    return res;
}

SurvivalCount empirical_survival(const Path& path, const CrossSection& K, double rho, std::size_t n_fields,
                                 std::uint64_t seed, std::size_t workers) {
    // X_n ∈ K + p iff p ∈ X_n + K̂: only atoms inside the K̂-sausage matter,
    // so the field must cover that sausage's bounding cube.
    const BoundingCube cube = bounding_cube(path, K.reflected());
    const Region region = Region::cube(cube.center, cube.side / 2.0 + 2.0 * K.coordinate_radius());
    std::vector<char> alive(n_fields, 0);
    parallel_for(n_fields, resolve_workers(workers), [&](std::size_t j) {
        const ObstacleField field = sample_obstacles(rho, region, K, rng::derive_seed(seed, j));
        alive[j] = first_hitting_time(path, field, 1.0, 0.0).hit ? 0 : 1;
    });
    SurvivalCount out;
    out.trials = n_fields;
    for (char a : alive) out.survived += static_cast<std::size_t>(a);
    return out;
}

SurvivalSummary survival_experiment(const VelocityField& field, double epsilon, const CrossSection& K,
                                    const SurvivalParams& params) {
    if (!(params.sigma > 0.0)) throw ConfigError("sigma must be positive");
    if (!(params.horizon > 0.0)) throw ConfigError("horizon must be positive");
    if (!(params.dt > 0.0) || params.dt > kMaxDt) throw ConfigError("dt must be in (0, 0.1]");
    if (params.n_paths < 1 || params.n_obstacle_fields < 1) throw ConfigError("need at least one trial");
    if (!(params.lambda_bar_ref > 0.0)) throw ConfigError("lambda_bar_ref must be positive");
    if (K.dimension() != field.dimension()) throw ConfigError("cross-section and field dimensions differ");

    const CrossSection hitting_shape = K;  // X_t ∈ K + p
    const double sigma2 = params.sigma * params.sigma;
    const double rho = 1.0 / sigma2;
    const double real_horizon = sigma2 * params.horizon;
    const auto n_steps = static_cast<std::size_t>(std::ceil(real_horizon / params.dt));
    const double margin = safe_margin(hitting_shape, params.safety_band);
    const double half = params.region_half_side > 0.0
                            ? params.region_half_side
                            : margin +
                                  params.tail_multiplier * epsilon * std::sqrt(real_horizon) +
                                  field.max_speed() * real_horizon;
    const auto d = static_cast<std::size_t>(field.dimension());
    const std::vector<double> x0(d, 0.0);
    const Region region = Region::cube(x0, half);

    SurvivalSummary out;
    out.sigma = params.sigma;
    out.lambda_bar_ref = params.lambda_bar_ref;
    out.horizon = params.horizon;
    out.expected_obstacles = rho * region.volume();
    if (params.lambda_bar_ref * params.horizon < 1.0) {
        out.advisory = "expected hits per trial within the window is below 1; increase horizon";
    }

    const std::size_t per_path = params.n_obstacle_fields;
    out.trials.resize(params.n_paths * per_path);
    parallel_for(params.n_paths, resolve_workers(params.workers), [&](std::size_t i) {
        const std::uint64_t path_seed = rng::derive_seed(rng::derive_seed(params.master_seed, i), 0);
        std::vector<PointIndex> indices;
        std::vector<std::size_t> open;
        indices.reserve(per_path);
        for (std::size_t j = 0; j < per_path; ++j) {
            const std::uint64_t field_seed = rng::derive_seed(rng::derive_seed(params.master_seed, i), j + 1);
            const ObstacleField obstacles = sample_obstacles(rho, region, hitting_shape, field_seed);
            indices.emplace_back(obstacles.points, static_cast<int>(d), hitting_shape);
            auto& tr = out.trials[i * per_path + j];
            tr.seed_path = path_seed;
            tr.seed_field = field_seed;
            open.push_back(j);
        }

        EulerMaruyama em(field, epsilon, params.dt, x0, path_seed);
        auto inspect = [&] {
            const auto x = em.position();
            const double t = em.time() / sigma2;
            const bool inside = region.contains(x, margin);
            std::erase_if(open, [&](std::size_t j) {
                auto& tr = out.trials[i * per_path + j];
                if (indices[j].covers(x)) {
                    tr.hit = true;
                    tr.t_hit = t;
                    return true;
                }
                if (!inside) {
                    tr.censored = true;
                    tr.boundary = true;
                    tr.t_hit = t;
                    return true;
                }
                return false;
            });
        };
        inspect();
        while (!open.empty() && em.steps_taken() < n_steps) {
            em.step();
            inspect();
        }
        for (std::size_t j : open) {
            auto& tr = out.trials[i * per_path + j];
            tr.censored = true;
            tr.t_hit = em.time() / sigma2;
        }
    });

    double exposure = 0.0;
    for (const auto& tr : out.trials) {
        exposure += tr.t_hit;
        if (tr.hit) ++out.n_hits;
        if (tr.censored) ++out.n_censored;
        if (tr.boundary) ++out.n_boundary;
    }
    if (out.n_hits < kMinHits) {
        throw InsufficientDataError("only " + std::to_string(out.n_hits) + " uncensored hits (need 30)");
    }
    out.lambda_hat = static_cast<double>(out.n_hits) / exposure;
    out.ks_distance = ks_distance_exponential(out.trials, params.lambda_bar_ref, params.horizon);
    return out;
}

double ks_distance_exponential(const std::vector<SurvivalTrial>& trials, double lambda, double window) {
    const std::vector<double> t = hit_times(trials);
    const auto n = static_cast<double>(trials.size());
    double worst = 0.0;
    for (std::size_t i = 0; i < t.size() && t[i] <= window; ++i) {
        const double model = 1.0 - std::exp(-lambda * t[i]);
        const double before = static_cast<double>(i) / n;
        const double after = static_cast<double>(i + 1) / n;
        worst = std::max({worst, std::abs(model - before), std::abs(after - model)});
    }
    // Tail up to the window edge.
    const auto within = static_cast<double>(std::count_if(t.begin(), t.end(), [&](double x) { return x <= window; }));
    worst = std::max(worst, std::abs(within / n - (1.0 - std::exp(-lambda * window))));
    return worst;
}

double ks_distance_two_sample(const std::vector<SurvivalTrial>& a, const std::vector<SurvivalTrial>& b,
                              double window) {
    const std::vector<double> ta = hit_times(a);
    const std::vector<double> tb = hit_times(b);
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double worst = 0.0;
    while (i < ta.size() || j < tb.size()) {
        double t = std::min(i < ta.size() ? ta[i] : INFINITY, j < tb.size() ? tb[j] : INFINITY);
        if (t > window) break;
        while (i < ta.size() && ta[i] <= t) ++i;
        while (j < tb.size() && tb[j] <= t) ++j;
        worst = std::max(worst, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return worst;
}

MemorylessCheck memoryless_check(const std::vector<SurvivalTrial>& trials, double s, double t) {
    std::size_t n_s = 0, n_t = 0, n_st = 0;
    const double ps = survival_at(trials, s, &n_s);
    const double pt = survival_at(trials, t, &n_t);
    const double pst = survival_at(trials, s + t, &n_st);
    MemorylessCheck out;
    out.unconditional = pt;
    out.conditional = ps > 0.0 ? pst / ps : 0.0;
    const double survivors = ps * static_cast<double>(n_s);
    const double var_cond = survivors > 0.0 ? out.conditional * (1.0 - out.conditional) / survivors : 0.0;
    const double var_t = n_t > 0 ? pt * (1.0 - pt) / static_cast<double>(n_t) : 0.0;
    out.std_error = std::sqrt(var_cond + var_t);
    return out;
}

}  // namespace sausage_lab
