#pragma once

#include <stdexcept>
#include <string>

namespace tdinv {

/// Rejected input: bad dimensions, out-of-range configuration values, malformed files.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A numerical solve did not reach its tolerance.
class SolverError : public std::runtime_error {
public:
    SolverError(const std::string& what, int step = -1, double residual = 0.0)
        : std::runtime_error(what), step_(step), residual_(residual) {}

    /// Time step (or outer iteration) at which the failure happened, -1 when not applicable.
    int step() const noexcept { return step_; }
    double residual() const noexcept { return residual_; }

private:
    int step_;
    double residual_;
};

}  // namespace tdinv

namespace tdinv {

/// File could not be read or written; the message carries the path.
class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace tdinv
