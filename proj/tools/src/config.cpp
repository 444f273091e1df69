#include "config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "sausage_lab/error.hpp"

namespace sausage_lab::cli {
namespace {

std::string trim(std::string s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string::npos) return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& raw) {
    T value{};
    const auto* end = raw.data() + raw.size();
    const auto res = std::from_chars(raw.data(), end, value);
    if (res.ec != std::errc{} || res.ptr != end) {
        throw ConfigError("key '" + key + "': cannot parse '" + raw + "'");
    }
    return value;
}

}  // namespace

ExperimentConfig ExperimentConfig::load(const std::filesystem::path& file, const std::string& command) {
    std::ifstream in(file);
    if (!in) throw ConfigError("cannot read config file " + file.string());
    std::stringstream buf;
    buf << in.rdbuf();
    return parse(buf.str(), command);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text, const std::string& command) {
    ExperimentConfig cfg(command);
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        line = trim(line.substr(0, line.find('#')));
        if (line.empty()) continue;
        // A stored config starts with its command; accept it when it matches.
        if (line.rfind("command", 0) == 0 && line.find('=') != std::string::npos) {
            const auto value = trim(line.substr(line.find('=') + 1));
            if (value != command) throw ConfigError("config is for command '" + value + "', not '" + command + "'");
            continue;
        }
        cfg.set(line);
    }
    return cfg;
}

void ExperimentConfig::set(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("expected key=value, got '" + assignment + "'");
    const auto key = trim(assignment.substr(0, eq));
    if (key.empty()) throw ConfigError("empty key in '" + assignment + "'");
    values_[key] = trim(assignment.substr(eq + 1));
}

void ExperimentConfig::set_default(const std::string& key, const std::string& value) {
    values_.try_emplace(key, value);
}

std::string ExperimentConfig::text(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end() || it->second.empty()) throw ConfigError("missing required key '" + key + "'");
    return it->second;
}

double ExperimentConfig::real(const std::string& key) const {
    const double v = parse_number<double>(key, text(key));
    if (!std::isfinite(v)) throw ConfigError("key '" + key + "' must be finite");
    return v;
}

std::size_t ExperimentConfig::count(const std::string& key) const {
    // Accept 1e4-style spellings for counts.
    const double v = real(key);
    if (v < 0.0 || v != std::floor(v) || v > 1e15) throw ConfigError("key '" + key + "' must be a non-negative integer");
    return static_cast<std::size_t>(v);
}

int ExperimentConfig::integer(const std::string& key) const { return parse_number<int>(key, text(key)); }

std::uint64_t ExperimentConfig::seed(const std::string& key) const {
    return parse_number<std::uint64_t>(key, text(key));
}

std::vector<double> ExperimentConfig::reals(const std::string& key) const {
    std::vector<double> out;
    std::istringstream in(text(key));
    std::string item;
    while (std::getline(in, item, ',')) {
        item = trim(item);
        if (item.empty()) continue;
        out.push_back(parse_number<double>(key, item));
    }
    if (out.empty()) throw ConfigError("key '" + key + "' holds no values");
    return out;
}

void ExperimentConfig::require_known(const std::vector<std::string>& allowed) const {
    for (const auto& [key, value] : values_) {
        if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
            throw ConfigError("unknown key '" + key + "' for command " + command_);
        }
    }
}

std::string ExperimentConfig::canonical() const {
    std::string out = "command=" + command_ + "\n";
    for (const auto& [key, value] : values_) out += key + "=" + value + "\n";
    return out;
}

std::string ExperimentConfig::hash() const {
    std::uint64_t h = 0xcbf29ce484222325ull;
    for (unsigned char c : canonical()) {
        h ^= c;
        h *= 0x100000001b3ull;
    }
    static constexpr char digits[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i, h >>= 4) out[static_cast<std::size_t>(i)] = digits[h & 0xf];
    return out;
}

}  // namespace sausage_lab::cli
