#include "commands.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <ostream>
#include <sstream>

#include "sausage_lab/error.hpp"
#include "sausage_lab/obstacles.hpp"
#include "sausage_lab/parallel.hpp"
#include "sausage_lab/rates.hpp"
#include "sausage_lab/report.hpp"
#include "sausage_lab/rng.hpp"
#include "sausage_lab/sausage.hpp"

namespace sausage_lab::cli {
namespace {

using json = nlohmann::json;
using Defaults = std::map<std::string, std::string>;

// Listing every seed of a 10^4-realization run is noise; the schedule is
// a pure function of (master_seed, index) anyway.
constexpr std::size_t kMaxListedSeeds = 1000;

const std::vector<std::string> kGrowthKeys = {"field", "eps", "r", "K", "T", "dt", "m", "J",
                                              "n_realizations", "seed", "substeps", "unscaled_dt"};
const std::vector<std::string> kSweepKeys = {"field", "eps", "r_values", "K", "T", "dt", "m", "J",
                                             "n_realizations", "seed", "substeps", "unscaled_dt"};
const std::vector<std::string> kDiffusivityKeys = {"field", "eps", "r", "T", "dt", "n_realizations", "seed"};
const std::vector<std::string> kCapacityKeys = {"a_bar", "K", "T", "dt", "m", "J", "n_realizations", "seed"};
const std::vector<std::string> kSurvivalKeys = {"field", "eps", "r", "K", "sigma", "horizon", "n_paths",
                                                "n_obstacle_fields", "dt", "seed", "lambda_bar",
                                                "tail_multiplier", "refine_check"};
const std::vector<std::string> kOracleKeys = {"field", "eps", "K", "n_paths", "N", "dt", "m", "J",
                                              "resolution", "seed", "tolerance"};
const std::vector<std::string> kValidateKeys = {"field"};

// Reference-scale defaults first, desk-scale (10x smaller) second.
struct PresetDefaults {
    Defaults reference;
    Defaults desk;
};

const std::map<std::string, PresetDefaults>& preset_table() {
    static const std::map<std::string, PresetDefaults> table = {
        {"growth-rate",
         {{{"eps", "0.25"}, {"r", "1"}, {"K", "ball:1"}, {"T", "1e4"}, {"dt", "0.01"}, {"m", "4"}, {"J", "1e4"},
           {"n_realizations", "1"}, {"seed", "1"}, {"substeps", "1"}, {"unscaled_dt", "0.04"}},
          {{"T", "1e3"}, {"J", "1e3"}, {"n_realizations", "20"}}}},
        {"sweep-r",
         {{{"eps", "0.25"}, {"r_values", "0.01,0.1,0.5,1,2,5,10,50"}, {"K", "ball:1"}, {"T", "1e4"},
           {"dt", "0.01"}, {"m", "4"}, {"J", "1e4"}, {"n_realizations", "1"}, {"seed", "1"}, {"substeps", "1"},
           {"unscaled_dt", "0.04"}},
          {{"T", "1e3"}, {"J", "1e3"}, {"n_realizations", "20"}}}},
        {"diffusivity",
         {{{"eps", "0.25"}, {"r", "1"}, {"T", "1e4"}, {"dt", "0.01"}, {"n_realizations", "1e4"}, {"seed", "1"}},
          {{"T", "1e3"}, {"n_realizations", "1e3"}}}},
        {"capacity",
         {{{"a_bar", "0.0942,0.0942,0.03125"}, {"K", "ball:1"}, {"T", "1e4"}, {"dt", "0.01"}, {"m", "4"},
           {"J", "1e4"}, {"n_realizations", "1"}, {"seed", "1"}},
          {{"T", "1e3"}, {"J", "1e3"}, {"n_realizations", "20"}}}},
        {"survival",
         {{{"eps", "1"}, {"r", "1"}, {"K", "ball:1"}, {"sigma", "40,80"}, {"horizon", "0.5"}, {"n_paths", "1000"},
           {"n_obstacle_fields", "1"}, {"dt", "0.01"}, {"seed", "1"}, {"tail_multiplier", "6"},
           {"refine_check", "1"}},
          {{"sigma", "20,40"}, {"n_paths", "300"}}}},
        {"oracle-check",
         {{{"field", "zero"}, {"eps", "0.25"}, {"K", "ball:1"}, {"n_paths", "10"}, {"N", "1000"}, {"dt", "0.01"},
           {"m", "4"}, {"J", "1e3"}, {"resolution", "8"}, {"seed", "1"}, {"tolerance", "0.02"}},
          {}}},
        {"validate-field", {{}, {}}},
    };
    return table;
}

std::vector<double> positive_list(const ExperimentConfig& cfg, const std::string& key) {
    auto values = cfg.reals(key);
    for (double v : values) {
        if (!(v > 0.0)) throw ConfigError("key '" + key + "' must hold positive values");
    }
    return values;
}

VelocityField field_of(const ExperimentConfig& cfg, double r) {
    if (!(r > 0.0)) throw ConfigError("r must be positive");
    auto field = VelocityField::from_id(cfg.text("field"));
    return r == 1.0 ? field : field.scaled(r);
}

CrossSection cross_section_of(const ExperimentConfig& cfg, int dimension) {
    return CrossSection::parse(cfg.text("K"), dimension);
}

GrowthRateParams growth_params(const ExperimentConfig& cfg, const RunOptions& opts) {
    GrowthRateParams p;
    p.T = cfg.real("T");
    p.dt = cfg.real("dt");
    p.m = cfg.integer("m");
    p.J = cfg.count("J");
    p.n_realizations = cfg.count("n_realizations");
    p.master_seed = cfg.seed("seed");
    if (cfg.has("substeps")) p.substeps = cfg.count("substeps");
    p.workers = opts.workers;
    p.validate();
    return p;
}

json config_json(const ExperimentConfig& cfg) {
    return {{"command", cfg.command()}, {"hash", cfg.hash()}, {"values", cfg.values()}};
}

json seed_schedule(std::uint64_t master, std::size_t n) {
    json list = json::array();
    for (std::size_t i = 0; i < std::min(n, kMaxListedSeeds); ++i) {
        const auto s = realization_seeds(master, i);
        list.push_back({{"index", i}, {"path_seed", s.path}, {"sampling_seed", s.sampling}});
    }
    return {{"master_seed", master},
            {"derivation", "base=derive_seed(master, i); path=derive_seed(base, 0); sampling=derive_seed(base, 1)"},
            {"realizations", n},
            {"listed", list},
            {"truncated", n > kMaxListedSeeds}};
}

double steps_per_path(double T, double dt) { return std::ceil(T / dt - 1e-9); }

// Upper bound on membership queries: every sub-cube retained, J each.
double max_queries(int m, std::size_t J, int d) {
    return std::pow(2.0, m * d) * static_cast<double>(J);
}

class RunLog {
public:
    explicit RunLog(const std::filesystem::path& dir) : out_(dir / "log.txt", std::ios::app) {}
    void line(const std::string& text) { out_ << text << '\n' << std::flush; }

private:
    std::ofstream out_;
};

void write_text(const std::filesystem::path& file, const std::string& text) {
    std::ofstream out(file);
    if (!out) throw ResourceError("cannot write " + file.string());
    out << text;
}

json read_sweep_csv(const std::filesystem::path& file) {
    json rows = json::array();
    std::ifstream in(file);
    std::string line;
    std::vector<std::string> header;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> cells;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) cells.push_back(cell);
        if (header.empty()) {
            header = cells;
            continue;
        }
        json row;
        for (std::size_t k = 0; k < header.size() && k < cells.size(); ++k) {
            if (header[k] == "seed") {
                row[header[k]] = std::stoull(cells[k]);
            } else {
                row[header[k]] = std::stod(cells[k]);
            }
        }
        rows.push_back(std::move(row));
    }
    std::sort(rows.begin(), rows.end(), [](const json& a, const json& b) { return a["r"] < b["r"]; });
    return rows;
}

// ---- growth-rate -------------------------------------------------------

json plan_growth(const ExperimentConfig& cfg, const RunOptions& opts, double r) {
    const auto p = growth_params(cfg, opts);
    const auto field = field_of(cfg, r);
    const auto sub = p.substeps * substeps_for_scale(p.dt, r, cfg.real("unscaled_dt"));
    const double steps = steps_per_path(p.T, p.dt) * static_cast<double>(sub) * static_cast<double>(p.n_realizations);
    return {{"seeds", seed_schedule(p.master_seed, p.n_realizations)},
            {"work",
             {{"integration_steps", steps},
              {"substeps", sub},
              {"max_membership_queries",
               max_queries(p.m, p.J, field.dimension()) * static_cast<double>(p.n_realizations)}}}};
}

GrowthRateResult run_growth(const ExperimentConfig& cfg, const RunOptions& opts, double r) {
    auto p = growth_params(cfg, opts);
    const auto field = field_of(cfg, r);
    const auto K = cross_section_of(cfg, field.dimension());
    p.substeps *= substeps_for_scale(p.dt, r, cfg.real("unscaled_dt"));
    return estimate_growth_rate(field, cfg.real("eps"), K, p);
}

Outcome cmd_growth_rate(const ExperimentConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir) {
    const double r = cfg.real("r");
    Outcome out;
    if (opts.dry_run) {
        out.document = plan_growth(cfg, opts, r);
        return out;
    }
    RunLog log(dir);
    log.line("growth-rate r=" + report::format_double(r));
    const auto res = run_growth(cfg, opts, r);
    const auto csv = dir / "results.csv";
    std::filesystem::remove(csv);
    report::append_csv(csv, report::csv_header(report::kSweepColumns), report::csv_row(r, res));
    out.document["result"] = report::to_json(res);
    log.line("gamma_hat=" + report::format_double(res.gamma_hat));
    return out;
}

// ---- sweep-r -----------------------------------------------------------

Outcome cmd_sweep_r(const ExperimentConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir) {
    auto r_values = positive_list(cfg, "r_values");
    std::sort(r_values.begin(), r_values.end());
    r_values.erase(std::unique(r_values.begin(), r_values.end()), r_values.end());
    Outcome out;
    const auto csv = dir / "sweep.csv";
    if (opts.dry_run) {
        json rows = json::array();
        const auto done = report::completed_sweep_rows(csv);
        for (double r : r_values) {
            auto plan = plan_growth(cfg, opts, r);
            rows.push_back({{"r", r}, {"completed", done.contains(report::format_double(r))}, {"work", plan["work"]}});
        }
        out.document = {{"seeds", plan_growth(cfg, opts, r_values.front())["seeds"]}, {"rows", rows}};
        return out;
    }
    RunLog log(dir);
    if (const auto dropped = report::drop_incomplete_rows(csv); dropped > 0) {
        log.line("dropped " + std::to_string(dropped) + " incomplete row(s) from sweep.csv");
    }
    const auto done = report::completed_sweep_rows(csv);
    json errors = json::array();
    for (double r : r_values) {
        const auto key = report::format_double(r);
        if (done.contains(key)) {
            log.line("r=" + key + " already complete, skipped");
            continue;
        }
        log.line("r=" + key + " running");
        try {
            const auto res = run_growth(cfg, opts, r);
            report::append_csv(csv, report::csv_header(report::kSweepColumns), report::csv_row(r, res));
            log.line("r=" + key + " gamma_hat=" + report::format_double(res.gamma_hat));
        } catch (const ConfigError&) {
            throw;
        } catch (const Error& e) {
            errors.push_back({{"r", r}, {"kind", e.kind()}, {"message", e.what()}});
            log.line("r=" + key + " failed: " + e.what());
        }
    }
    out.document["result"] = {{"rows", read_sweep_csv(csv)}, {"errors", errors}, {"csv", csv.string()}};
    return out;
}

// ---- diffusivity -------------------------------------------------------

Outcome cmd_diffusivity(const ExperimentConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir) {
    DiffusivityParams p;
    p.T = cfg.real("T");
    p.dt = cfg.real("dt");
    p.n_realizations = cfg.count("n_realizations");
    p.master_seed = cfg.seed("seed");
    p.workers = opts.workers;
    const auto field = field_of(cfg, cfg.real("r"));
    Outcome out;
    if (opts.dry_run) {
        out.document = {{"seeds", seed_schedule(p.master_seed, p.n_realizations)},
                        {"work",
                         {{"integration_steps",
                           steps_per_path(p.T, p.dt) * static_cast<double>(p.n_realizations)}}}};
        return out;
    }
    RunLog log(dir);
    const auto res = estimate_effective_diffusivity(field, cfg.real("eps"), p);
    out.document["result"] = report::to_json(res);
    log.line("alpha_hat=" + report::format_double(res.alpha_hat));
    return out;
}

// ---- capacity ----------------------------------------------------------

Eigen::MatrixXd matrix_of(const std::vector<double>& values) {
    const auto n = values.size();
    const auto d = static_cast<Eigen::Index>(std::lround(std::sqrt(static_cast<double>(n))));
    if (static_cast<std::size_t>(d * d) == n && d > 1) {
        Eigen::MatrixXd a(d, d);
        for (Eigen::Index i = 0; i < d; ++i) {
            for (Eigen::Index j = 0; j < d; ++j) a(i, j) = values[static_cast<std::size_t>(i * d + j)];
        }
        return a;
    }
    // Otherwise the list is the diagonal.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < n; ++i) a(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(i)) = values[i];
    return a;
}

Outcome cmd_capacity(const ExperimentConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir) {
    const auto a_bar = matrix_of(cfg.reals("a_bar"));
    const auto K = cross_section_of(cfg, static_cast<int>(a_bar.rows()));
    auto p = growth_params(cfg, opts);
    Outcome out;
    if (opts.dry_run) {
        out.document = {{"a_bar", report::to_json(a_bar)},
                        {"seeds", seed_schedule(p.master_seed, p.n_realizations)},
                        {"work",
                         {{"integration_steps", steps_per_path(p.T, p.dt) * static_cast<double>(p.n_realizations)},
                          {"max_membership_queries", max_queries(p.m, p.J, static_cast<int>(a_bar.rows())) *
                                                         static_cast<double>(p.n_realizations)}}}};
        return out;
    }
    RunLog log(dir);
    const auto res = capacity_anisotropic(a_bar, K, p);
    out.document["result"] = report::to_json(res);
    out.document["result"]["a_bar"] = report::to_json(a_bar);
    log.line("capacity=" + report::format_double(res.value));
    return out;
}

// ---- survival ----------------------------------------------------------

Outcome cmd_survival(const ExperimentConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir) {
    const auto sigmas = positive_list(cfg, "sigma");
    const double eps = cfg.real("eps");
    const auto field = field_of(cfg, cfg.real("r"));
    const auto K = cross_section_of(cfg, field.dimension());
    SurvivalParams p;
    p.horizon = cfg.real("horizon");
    p.n_paths = cfg.count("n_paths");
    p.n_obstacle_fields = cfg.count("n_obstacle_fields");
    p.dt = cfg.real("dt");
    p.master_seed = cfg.seed("seed");
    p.tail_multiplier = cfg.real("tail_multiplier");
    p.workers = opts.workers;
    // λ̄ = γ(ε, v, K̂); K̂ = K for the supported shapes. Without an explicit
    // value the zero-drift capacity ε²·capp(K) serves for balls.
    if (cfg.has("lambda_bar")) {
        p.lambda_bar_ref = cfg.real("lambda_bar");
    } else if (K.shape() == CrossSection::Shape::Ball && field.dimension() >= 3) {
        p.lambda_bar_ref = eps * eps * capacity_ball(K.radius(), field.dimension());
    } else {
        throw ConfigError("missing required key 'lambda_bar'");
    }

    Outcome out;
    if (opts.dry_run) {
        json rows = json::array();
        for (double sigma : sigmas) {
            const double steps = steps_per_path(sigma * sigma * p.horizon, p.dt);
            rows.push_back({{"sigma", sigma},
                            {"integration_steps", steps * static_cast<double>(p.n_paths)},
                            {"trials", p.n_paths * p.n_obstacle_fields}});
        }
        out.document = {{"seeds",
                         {{"master_seed", p.master_seed},
                          {"derivation", "path=derive_seed(derive_seed(master, i), 0); "
                                         "field j=derive_seed(derive_seed(master, i), j+1)"}}},
                        {"lambda_bar_ref", p.lambda_bar_ref},
                        {"work", rows}};
        return out;
    }
    RunLog log(dir);
    const auto csv = dir / "trials.csv";
    std::filesystem::remove(csv);
    json summaries = json::array();
    std::vector<SurvivalSummary> results;
    for (double sigma : sigmas) {
        p.sigma = sigma;
        log.line("sigma=" + report::format_double(sigma) + " running");
        auto res = survival_experiment(field, eps, K, p);
        for (const auto& tr : res.trials) {
            report::append_csv(csv, report::csv_header(report::kTrialColumns), report::csv_row(sigma, tr));
        }
        summaries.push_back(report::to_json(res));
        log.line("sigma=" + report::format_double(sigma) + " lambda_hat=" + report::format_double(res.lambda_hat));
        results.push_back(std::move(res));
    }
    json consistency = json::array();
    for (std::size_t i = 1; i < results.size(); ++i) {
        consistency.push_back({{"sigma_a", results[i - 1].sigma},
                               {"sigma_b", results[i].sigma},
                               {"ks_distance", ks_distance_two_sample(results[i - 1].trials, results[i].trials,
                                                                      p.horizon)}});
    }
    out.document["result"] = {{"summaries", summaries}, {"consistency", consistency}, {"csv", csv.string()}};

    // Grid-hitting bias check: the smallest σ again with Δt halved.
    if (cfg.integer("refine_check") != 0) {
        p.sigma = results.front().sigma;
        p.dt /= 2.0;
        log.line("refinement check at dt=" + report::format_double(p.dt));
        const auto fine = survival_experiment(field, eps, K, p);
        const auto& coarse = results.front();
        const double change = std::abs(fine.lambda_hat - coarse.lambda_hat) / coarse.lambda_hat;
        const double se = std::hypot(coarse.lambda_hat / std::sqrt(static_cast<double>(coarse.n_hits)),
                                     fine.lambda_hat / std::sqrt(static_cast<double>(fine.n_hits)));
        out.document["result"]["refinement"] = {{"sigma", p.sigma},
                                                {"dt", p.dt},
                                                {"lambda_hat", fine.lambda_hat},
                                                {"relative_change", change},
                                                {"combined_std_error", se},
                                                {"within_5_percent", change < 0.05}};
    }
    return out;
}

// ---- oracle-check ------------------------------------------------------

Outcome cmd_oracle_check(const ExperimentConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir) {
    const auto field = field_of(cfg, 1.0);
    const auto K = cross_section_of(cfg, field.dimension());
    const auto n_paths = cfg.count("n_paths");
    const auto master = cfg.seed("seed");
    const int m = cfg.integer("m");
    const auto J = cfg.count("J");
    const int resolution = cfg.integer("resolution");
    const double tolerance = cfg.real("tolerance");
    IntegratorConfig ic;
    ic.epsilon = cfg.real("eps");
    ic.dt = cfg.real("dt");
    ic.n_steps = cfg.count("N");
    ic.x0.assign(static_cast<std::size_t>(field.dimension()), 0.0);
    ic.validate();
    if (n_paths < 1) throw ConfigError("n_paths must be >= 1");
    if (resolution < 1 || static_cast<std::uint64_t>(resolution) * static_cast<std::uint64_t>(field.dimension()) > 31) {
        throw ConfigError("resolution must satisfy 1 <= resolution and resolution*d <= 31");
    }

    Outcome out;
    if (opts.dry_run) {
        out.document = {{"seeds", seed_schedule(master, n_paths)},
                        {"work",
                         {{"integration_steps", static_cast<double>(ic.n_steps * n_paths)},
                          {"voxels_per_path", std::pow(2.0, resolution * field.dimension())}}}};
        return out;
    }
    RunLog log(dir);
    json rows = json::array();
    std::vector<double> errors(n_paths, 0.0);
    std::vector<SausageEstimate> estimates(n_paths);
    std::vector<double> oracle(n_paths, 0.0);
    parallel_for(n_paths, resolve_workers(opts.workers), [&](std::size_t i) {
        const auto seeds = realization_seeds(master, i);
        IntegratorConfig local = ic;
        local.seed = seeds.path;
        const Path path = integrate(field, local);
        estimates[i] = estimate_volume(path, K, m, J, seeds.sampling, 1);
        oracle[i] = voxel_oracle_volume(path, K, resolution);
        errors[i] = std::abs(estimates[i].v_hat - oracle[i]) / oracle[i];
    });
    for (std::size_t i = 0; i < n_paths; ++i) {
        rows.push_back({{"index", i},
                        {"v_hat", estimates[i].v_hat},
                        {"std_error", estimates[i].std_error},
                        {"v_oracle", oracle[i]},
                        {"relative_error", errors[i]}});
    }
    const double worst = *std::max_element(errors.begin(), errors.end());
    out.document["result"] = {{"paths", rows}, {"max_relative_error", worst}, {"tolerance", tolerance},
                              {"pass", worst <= tolerance}};
    log.line("max_relative_error=" + report::format_double(worst));
    if (worst > tolerance) out.exit_code = kExitCheckFailed;
    return out;
}

// ---- validate-field ----------------------------------------------------

Outcome cmd_validate_field(const ExperimentConfig& cfg, const RunOptions& opts, const std::filesystem::path& dir) {
    // Custom fields are validated on load, so a bad one surfaces as a config error.
    const auto id = cfg.text("field");
    Outcome out;
    if (opts.dry_run) {
        out.document = {{"field", id}};
        return out;
    }
    RunLog log(dir);
    const auto field = VelocityField::from_id(id);
    const auto report = inspect_field(field);
    out.document["result"] = {{"field", id},
                              {"dimension", field.dimension()},
                              {"max_divergence", report.max_divergence},
                              {"mean_norm", report.mean_norm},
                              {"max_speed", field.max_speed()},
                              {"ok", report.ok}};
    if (!report.ok) out.exit_code = kExitCheckFailed;
    return out;
}

using Handler = std::function<Outcome(const ExperimentConfig&, const RunOptions&, const std::filesystem::path&)>;

const std::map<std::string, Handler>& handlers() {
    static const std::map<std::string, Handler> table = {
        {"growth-rate", cmd_growth_rate},   {"sweep-r", cmd_sweep_r},
        {"diffusivity", cmd_diffusivity},   {"capacity", cmd_capacity},
        {"survival", cmd_survival},         {"oracle-check", cmd_oracle_check},
        {"validate-field", cmd_validate_field},
    };
    return table;
}

}  // namespace

const std::vector<CommandInfo>& commands() {
    static const std::vector<CommandInfo> list = {
        {"growth-rate", "growth rate |S_T|/T of the sausage of X^(r)", kGrowthKeys},
        {"sweep-r", "growth rate over a list of r values (resumable CSV)", kSweepKeys},
        {"diffusivity", "effective diffusivity alpha = E|X^1_T|^2/T", kDiffusivityKeys},
        {"capacity", "anisotropic capacity via the sausage of a Brownian motion with covariance a_bar",
         kCapacityKeys},
        {"survival", "rescaled obstacle hitting times and their exponential fit", kSurvivalKeys},
        {"oracle-check", "octree estimator against the voxel brute force", kOracleKeys},
        {"validate-field", "divergence and cell-mean checks of a velocity field", kValidateKeys},
    };
    return list;
}

void apply_preset(ExperimentConfig& cfg, const std::string& preset) {
    const auto& table = preset_table();
    const auto it = table.find(cfg.command());
    if (it == table.end()) throw ConfigError("unknown command '" + cfg.command() + "'");
    if (preset != "reference" && preset != "desk") throw ConfigError("unknown preset '" + preset + "'");
    if (preset == "desk") {
        for (const auto& [key, value] : it->second.desk) cfg.set_default(key, value);
    }
    for (const auto& [key, value] : it->second.reference) cfg.set_default(key, value);
}

std::filesystem::path run_directory(const ExperimentConfig& cfg, const RunOptions& opts) {
    return opts.out_root / cfg.command() / cfg.hash();
}

Outcome execute(const ExperimentConfig& cfg, const RunOptions& opts) {
    const auto it = handlers().find(cfg.command());
    if (it == handlers().end()) throw ConfigError("unknown command '" + cfg.command() + "'");
    const auto& info = *std::find_if(commands().begin(), commands().end(),
                                     [&](const CommandInfo& c) { return c.name == cfg.command(); });
    cfg.require_known(info.keys);

    const auto dir = run_directory(cfg, opts);
    if (!opts.dry_run) {
        std::filesystem::create_directories(dir);
        write_text(dir / "config.txt", cfg.canonical());
    }
    Outcome out = it->second(cfg, opts, dir);
    out.run_dir = dir;
    out.document["config"] = config_json(cfg);
    out.document["run_dir"] = dir.string();
    if (opts.dry_run) {
        out.document["dry_run"] = true;
    } else {
        write_text(dir / "result.json", out.document.dump(2) + "\n");
    }
    return out;
}

json error_json(const std::string& kind, const std::string& message) {
    return {{"error", {{"kind", kind}, {"message", message}}}};
}

int run(const ExperimentConfig& cfg, const RunOptions& opts, std::ostream& out) {
    try {
        const auto outcome = execute(cfg, opts);
        out << outcome.document.dump(2) << '\n';
        return outcome.exit_code;
    } catch (const Error& e) {
        auto doc = error_json(e.kind(), e.what());
        if (const auto* re = dynamic_cast<const RealizationError*>(&e)) doc["error"]["realization"] = re->index();
        doc["config"] = config_json(cfg);
        if (!opts.dry_run) {
            const auto dir = run_directory(cfg, opts);
            std::error_code ec;
            if (std::filesystem::is_directory(dir, ec)) {
                std::ofstream(dir / "error.json") << doc.dump(2) << '\n';
            }
        }
        out << doc.dump(2) << '\n';
        return dynamic_cast<const ConfigError*>(&e) ? kExitUsage : kExitFailure;
    } catch (const std::filesystem::filesystem_error& e) {
        out << error_json("resource", e.what()).dump(2) << '\n';
        return kExitFailure;
    }
}

}  // namespace sausage_lab::cli
