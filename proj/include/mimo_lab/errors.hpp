#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace mimo_lab {

/// Invalid argument, dimension or configuration value.
class ArgumentError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Raised by the Cholesky factorization when a pivot is not (numerically) positive.
class SingularMatrixError : public std::runtime_error {
public:
    SingularMatrixError(std::size_t pivot, const std::string& what)
        : std::runtime_error(what), pivot_(pivot) {}

    std::size_t pivot() const noexcept { return pivot_; }

private:
    std::size_t pivot_;
};

/// A channel row is identically zero, so no beam can be matched to it.
class DegenerateChannelError : public std::runtime_error {
public:
    DegenerateChannelError(std::size_t ue, const std::string& what)
        : std::runtime_error(what), ue_(ue) {}

    std::size_t ue() const noexcept { return ue_; }

private:
    std::size_t ue_;
};

/// The requested precoder or operating point does not exist (e.g. ZF with M <= K).
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure inside one Monte Carlo realization.
class SimulationError : public std::runtime_error {
public:
    SimulationError(std::uint64_t realization, const std::string& what)
        : std::runtime_error("realization " + std::to_string(realization) + ": " + what),
          realization_(realization) {}

    std::uint64_t realization() const noexcept { return realization_; }

private:
    std::uint64_t realization_;
};

/// Config document error. line is 0 when the problem is not tied to a single line
/// (e.g. a missing key).
class ParseError : public std::runtime_error {
public:
    ParseError(std::string key, std::size_t line, const std::string& message)
        : std::runtime_error(format(key, line, message)), key_(std::move(key)), line_(line) {}

    const std::string& key() const noexcept { return key_; }
    std::size_t line() const noexcept { return line_; }

private:
    static std::string format(const std::string& key, std::size_t line, const std::string& message) {
        std::string out;
        if (line > 0) out += "line " + std::to_string(line) + ": ";
        if (!key.empty()) out += "key '" + key + "': ";
        return out + message;
    }

    std::string key_;
    std::size_t line_;
};

}  // namespace mimo_lab
