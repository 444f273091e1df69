#pragma once

// JSON objects and CSV rows emitted for results.

#include <filesystem>
#include <set>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "sausage_lab/obstacles.hpp"
#include "sausage_lab/rates.hpp"
#include "sausage_lab/sausage.hpp"

namespace sausage_lab::report {

nlohmann::json to_json(const SausageEstimate& est);
nlohmann::json to_json(const GrowthRateResult& res);
nlohmann::json to_json(const DiffusivityResult& res);
nlohmann::json to_json(const AnisotropicCapacityResult& res);
/// Summary only: lambda_hat, lambda_bar_ref, ks_distance, n_hits, n_censored, ...
nlohmann::json to_json(const SurvivalSummary& res);
nlohmann::json to_json(const Eigen::MatrixXd& m);

/// Column lists of the CSV tables.
inline const std::vector<std::string> kSausageColumns = {"v_hat", "gamma_hat", "T", "m", "J", "I", "L", "std_error", "seed"};
inline const std::vector<std::string> kSweepColumns = {"r", "gamma_hat", "std_error", "n_realizations", "T", "dt", "m", "J", "eps", "seed"};
inline const std::vector<std::string> kTrialColumns = {"sigma", "seed_path", "seed_field", "hit", "t_hit", "censored"};

std::string csv_header(const std::vector<std::string>& columns);
std::string csv_row(const SausageEstimate& est);
std::string csv_row(double r, const GrowthRateResult& res);
std::string csv_row(double sigma, const SurvivalTrial& trial);

/// Full-precision decimal rendering used in every table.
std::string format_double(double v);

/// Appends `row` to `file`, writing `header` first when the file is new or empty.
void append_csv(const std::filesystem::path& file, const std::string& header, const std::string& row);

/// Values of the `r` column already present in a sweep CSV (empty if absent).
std::set<std::string> completed_sweep_rows(const std::filesystem::path& file);

/// Removes rows with the wrong field count, or without a trailing newline,
/// left behind by an interrupted run. Returns how many were dropped.
std::size_t drop_incomplete_rows(const std::filesystem::path& file);

}  // namespace sausage_lab::report
