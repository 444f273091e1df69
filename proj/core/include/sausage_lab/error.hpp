#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sausage_lab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;

    /// Stable machine-readable category, used by the CLI error JSON.
    [[nodiscard]] virtual const char* kind() const noexcept { return "error"; }
};

class ConfigError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "config"; }
};

class DomainError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "domain"; }
};

class ResourceError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "resource"; }
};

class DegenerateInputError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "degenerate-input"; }
};

class InsufficientDataError : public Error {
public:
    using Error::Error;
    [[nodiscard]] const char* kind() const noexcept override { return "insufficient-data"; }
};

class IntegrationDivergedError : public Error {
public:
    IntegrationDivergedError(std::size_t step, const std::string& what)
        : Error(what), step_(step) {}

    [[nodiscard]] const char* kind() const noexcept override { return "integration-diverged"; }
    [[nodiscard]] std::size_t step() const noexcept { return step_; }

private:
    std::size_t step_;
};

/// Wraps an error raised while processing realization `index` of a batch.
class RealizationError : public Error {
public:
    RealizationError(std::size_t index, const std::string& kind, const std::string& what)
        : Error("realization " + std::to_string(index) + ": " + what),
          index_(index), inner_kind_(kind) {}

    [[nodiscard]] const char* kind() const noexcept override { return inner_kind_.c_str(); }
    [[nodiscard]] std::size_t index() const noexcept { return index_; }

private:
    std::size_t index_;
    std::string inner_kind_;
};

}  // namespace sausage_lab
