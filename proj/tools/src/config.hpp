#pragma once

// Flat key=value experiment configuration.

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace sausage_lab::cli {

class ExperimentConfig {
public:
    ExperimentConfig() = default;
    explicit ExperimentConfig(std::string command) : command_(std::move(command)) {}

    /// Reads `key = value` lines; '#' starts a comment. Throws ConfigError.
    static ExperimentConfig load(const std::filesystem::path& file, const std::string& command);
    static ExperimentConfig parse(const std::string& text, const std::string& command);

    /// Applies "key=value"; throws ConfigError on malformed input.
    void set(const std::string& assignment);
    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    /// Sets key only when it is not present yet.
    void set_default(const std::string& key, const std::string& value);

    [[nodiscard]] bool has(const std::string& key) const { return values_.contains(key); }
    [[nodiscard]] const std::string& command() const noexcept { return command_; }
    [[nodiscard]] const std::map<std::string, std::string>& values() const noexcept { return values_; }

    [[nodiscard]] std::string text(const std::string& key) const;
    [[nodiscard]] double real(const std::string& key) const;
    [[nodiscard]] std::size_t count(const std::string& key) const;
    [[nodiscard]] int integer(const std::string& key) const;
    [[nodiscard]] std::uint64_t seed(const std::string& key) const;
    [[nodiscard]] std::vector<double> reals(const std::string& key) const;

    /// Throws ConfigError naming the first key outside `allowed`.
    void require_known(const std::vector<std::string>& allowed) const;

    /// Sorted `key=value` lines preceded by `command=<name>`.
    [[nodiscard]] std::string canonical() const;
    /// 16 hex digits of FNV-1a over canonical().
    [[nodiscard]] std::string hash() const;

private:
    std::string command_;
    std::map<std::string, std::string> values_;
};

}  // namespace sausage_lab::cli
