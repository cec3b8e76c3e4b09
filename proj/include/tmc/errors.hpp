#pragma once

#include <stdexcept>
#include <string>

namespace tmc {

// Configuration / input validation problems. The CLI maps these to exit 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested system exceeds a hard implementation cap (site count, sector size).
class CapacityError : public std::runtime_error {
public:
    explicit CapacityError(const std::string& msg) : std::runtime_error(msg) {}
};

// A lattice move whose matrix element vanishes (parallel spins, Pauli blocking).
class InvalidMoveError : public std::logic_error {
public:
    explicit InvalidMoveError(const std::string& msg) : std::logic_error(msg) {}
};

// Resolvent denominator r - S + (h_i + h_j)/2 went nonpositive. The CLI maps
// runtime aborts (this and ExtinctionError) to exit 3.
class ResolventError : public std::runtime_error {
public:
    explicit ResolventError(const std::string& msg) : std::runtime_error(msg) {}
};

// The walker ensemble died out.
class ExtinctionError : public std::runtime_error {
public:
    explicit ExtinctionError(const std::string& msg) : std::runtime_error(msg) {}
};

// Eigensolver failed to reach the requested tolerance.
class ConvergenceError : public std::runtime_error {
public:
    explicit ConvergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Statistical post-processing cannot produce a well-defined estimate.
class EstimateError : public std::runtime_error {
public:
    explicit EstimateError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace tmc
