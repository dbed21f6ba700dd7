#pragma once

#include <stdexcept>
#include <string>

namespace oseen {

/// Raised when problem data (coefficients, boundary values) cannot be
/// evaluated on the mesh the assembler is working with.
class DataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Raised when a linear or nonlinear solve cannot meet its contract.
class SolverFailure : public std::runtime_error {
public:
    SolverFailure(const std::string& what, double residual, int iterations)
        : std::runtime_error(what), residual_(residual), iterations_(iterations) {}

    double residual() const noexcept { return residual_; }
    int iterations() const noexcept { return iterations_; }

private:
    double residual_;
    int iterations_;
};

} // namespace oseen
