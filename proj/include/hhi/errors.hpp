#pragma once
// Error types shared by the library and the CLI.

#include <stdexcept>
#include <string>

namespace hhi {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A quadrature or series did not reach its tolerance within budget.
/// Carries the best value seen and its error estimate.
class ConvergenceError : public std::runtime_error {
public:
    ConvergenceError(const std::string& what, double partial, double err)
        : std::runtime_error(what), partial_value(partial), err_estimate(err) {}
    double partial_value;
    double err_estimate;
};

/// Malformed or inconsistent run configuration (CLI level).
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace hhi
