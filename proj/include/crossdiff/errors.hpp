#pragma once

#include <stdexcept>
#include <string>

namespace crossdiff {

// Bad or inconsistent configuration / parameters. CLI maps this to exit code 2.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Nonlinear solver or integrator failure. CLI maps this to exit code 1.
struct SolverError : std::runtime_error {
    explicit SolverError(const std::string& msg) : std::runtime_error(msg) {}
};

// State outside the domain of an operation (negative density, packing bound hit).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace crossdiff
