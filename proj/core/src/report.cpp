#include "sausage_lab/report.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <iterator>
#include <sstream>

#include "sausage_lab/error.hpp"

namespace sausage_lab::report {

std::string format_double(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return {buf, res.ptr};
}

nlohmann::json to_json(const Eigen::MatrixXd& m) {
    nlohmann::json rows = nlohmann::json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        nlohmann::json row = nlohmann::json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
        rows.push_back(std::move(row));
    }
    return rows;
}

nlohmann::json to_json(const SausageEstimate& est) {
    return {{"v_hat", est.v_hat}, {"gamma_hat", est.gamma_hat}, {"T", est.T},
            {"m", est.m},         {"J", est.J},                 {"I", est.I},
            {"L", est.L},         {"std_error", est.std_error}, {"seed", est.seed}};
}

nlohmann::json to_json(const GrowthRateResult& res) {
    return {{"gamma_hat", res.gamma_hat},
            {"std_error", res.std_error},
            {"epsilon", res.epsilon},
            {"scale_r", res.scale_r},
            {"cross_section", res.cross_section.describe()},
            {"T", res.T},
            {"dt", res.dt},
            {"m", res.m},
            {"J", res.J},
            {"n_realizations", res.n_realizations},
            {"seed", res.master_seed},
            {"per_realization", res.per_realization}};
}

nlohmann::json to_json(const DiffusivityResult& res) {
    return {{"alpha_hat", res.alpha_hat},
            {"alpha_std_error", res.alpha_std_error},
            {"epsilon", res.epsilon},
            {"T", res.T},
            {"dt", res.dt},
            {"n_realizations", res.n_realizations},
            {"drift_confined", res.drift_confined},
            {"a_bar", to_json(res.a_bar)},
            {"displacement_moment", to_json(res.displacement_moment)}};
}

nlohmann::json to_json(const AnisotropicCapacityResult& res) {
    nlohmann::json j = {{"capacity", res.value},
                        {"std_error", res.std_error},
                        {"per_realization", res.per_realization}};
    j["closed_form"] = res.closed_form ? nlohmann::json(*res.closed_form) : nlohmann::json(nullptr);
    return j;
}

nlohmann::json to_json(const SurvivalSummary& res) {
    nlohmann::json j = {{"sigma", res.sigma},
                        {"lambda_hat", res.lambda_hat},
                        {"lambda_bar_ref", res.lambda_bar_ref},
                        {"ks_distance", res.ks_distance},
                        {"n_hits", res.n_hits},
                        {"n_censored", res.n_censored},
                        {"n_boundary", res.n_boundary},
                        {"n_trials", res.trials.size()},
                        {"horizon", res.horizon},
                        {"expected_obstacles", res.expected_obstacles}};
    if (!res.advisory.empty()) j["advisory"] = res.advisory;
    return j;
}

std::string csv_header(const std::vector<std::string>& columns) {
    std::string out;
    for (std::size_t i = 0; i < columns.size(); ++i) {
        if (i) out += ',';
        out += columns[i];
    }
    return out;
}

std::string csv_row(const SausageEstimate& est) {
    std::ostringstream out;
    out << format_double(est.v_hat) << ',' << format_double(est.gamma_hat) << ',' << format_double(est.T) << ','
        << est.m << ',' << est.J << ',' << est.I << ',' << format_double(est.L) << ','
        << format_double(est.std_error) << ',' << est.seed;
    return out.str();
}

std::string csv_row(double r, const GrowthRateResult& res) {
    std::ostringstream out;
    out << format_double(r) << ',' << format_double(res.gamma_hat) << ',' << format_double(res.std_error) << ','
        << res.n_realizations << ',' << format_double(res.T) << ',' << format_double(res.dt) << ',' << res.m << ','
        << res.J << ',' << format_double(res.epsilon) << ',' << res.master_seed;
    return out.str();
}

std::string csv_row(double sigma, const SurvivalTrial& trial) {
    std::ostringstream out;
    out << format_double(sigma) << ',' << trial.seed_path << ',' << trial.seed_field << ',' << (trial.hit ? 1 : 0)
        << ',' << (trial.hit ? format_double(trial.t_hit) : std::string{}) << ',' << (trial.censored ? 1 : 0);
    return out.str();
}

void append_csv(const std::filesystem::path& file, const std::string& header, const std::string& row) {
    const bool fresh = !std::filesystem::exists(file) || std::filesystem::file_size(file) == 0;
    std::ofstream out(file, std::ios::app);
    if (!out) throw ResourceError("cannot append to " + file.string());
    if (fresh) out << header << '\n';
    out << row << '\n';
}

std::set<std::string> completed_sweep_rows(const std::filesystem::path& file) {
    std::set<std::string> done;
    std::ifstream in(file);
    if (!in) return done;
    // A row cut short by an interrupted write has fewer fields than the
    // header and does not count as done.
    std::string line;
    std::ptrdiff_t fields = -1;
    while (std::getline(in, line)) {
        const auto commas = std::count(line.begin(), line.end(), ',');
        if (fields < 0) {
            fields = commas;
            continue;
        }
        if (line.empty() || commas != fields) continue;
        done.insert(line.substr(0, line.find(',')));
    }
    return done;
}

std::size_t drop_incomplete_rows(const std::filesystem::path& file) {
    std::ifstream in(file, std::ios::binary);
    if (!in) return 0;
    std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    in.close();
    std::string kept;
    std::size_t dropped = 0;
    std::ptrdiff_t fields = -1;
    std::size_t pos = 0;
    while (pos < text.size()) {
        const auto end = text.find('\n', pos);
        if (end == std::string::npos) {
            ++dropped;  // no newline: the write was interrupted
            break;
        }
        const std::string line = text.substr(pos, end - pos);
        pos = end + 1;
        const auto commas = std::count(line.begin(), line.end(), ',');
        if (fields < 0) {
            fields = commas;
        } else if (line.empty() || commas != fields) {
            ++dropped;
            continue;
        }
        kept += line;
        kept += '\n';
    }
    if (dropped > 0) {
        std::ofstream out(file, std::ios::binary | std::ios::trunc);
        if (!out) throw ResourceError("cannot rewrite " + file.string());
        out << kept;
    }
    return dropped;
}

}  // namespace sausage_lab::report
