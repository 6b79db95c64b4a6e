#pragma once

#include <stdexcept>
#include <string>

namespace urnsim {

// Invalid configuration (bad parameter bounds, malformed spec fields).
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Mathematical domain violation (D < D0, index out of range, K == 0, ...).
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& msg) : std::runtime_error(msg) {}
};

// Estimator could not produce a fit (too few samples, degenerate data).
struct FitError : std::runtime_error {
    explicit FitError(const std::string& msg) : std::runtime_error(msg) {}
};

struct IoError : std::runtime_error {
    explicit IoError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested allocation exceeds the configured memory cap.
struct ResourceError : std::runtime_error {
    explicit ResourceError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace urnsim
