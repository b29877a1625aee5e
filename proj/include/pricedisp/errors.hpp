#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pdisp {

/// Raised when a parameter block violates its type invariants.
class InvalidParameter : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Model-level failures (the CLI maps these to exit status 2).
class ModelError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class ZeroSalesVolume : public ModelError {
public:
    ZeroSalesVolume() : ModelError("zero sales volume: supply and demand never coexist on the grid") {}
};

class NoIntercept : public ModelError {
public:
    NoIntercept() : ModelError("demand and supply curves do not cross on the grid") {}
};

class StabilityViolation : public ModelError {
public:
    StabilityViolation(double product, double bound)
        : ModelError("stability bound violated: eta*max(x,z)*dt = " + std::to_string(product) +
                     " must be < " + std::to_string(bound)),
          product_(product) {}
    double product() const { return product_; }

private:
    double product_;
};

class NonConvergence : public ModelError {
public:
    NonConvergence(std::size_t iterations, double gap)
        : ModelError("no convergence after " + std::to_string(iterations) +
                     " iterations, last gap " + std::to_string(gap)),
          iterations_(iterations), gap_(gap) {}
    std::size_t iterations() const { return iterations_; }
    double gap() const { return gap_; }

private:
    std::size_t iterations_;
    double gap_;
};

class QuadratureError : public ModelError {
public:
    QuadratureError(double achieved, double requested)
        : ModelError("quadrature did not converge: achieved relative error " +
                     std::to_string(achieved) + ", requested " + std::to_string(requested)),
          achieved_(achieved) {}
    double achieved() const { return achieved_; }

private:
    double achieved_;
};

class DegenerateSample : public ModelError {
public:
    DegenerateSample() : ModelError("degenerate sample: zero dispersion") {}
};

class EmptyFeasibleShift : public ModelError {
public:
    EmptyFeasibleShift() : ModelError("shift bounds leave no feasible shift below the sample minimum") {}
};

/// Input-level failures (the CLI maps these to exit status 1).
class InputError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class EmptyInput : public InputError {
public:
    EmptyInput() : InputError("empty input") {}
};

class MalformedRow : public InputError {
public:
    MalformedRow(std::size_t row, const std::string& reason)
        : InputError("malformed row " + std::to_string(row) + ": " + reason), row_(row) {}
    std::size_t row() const { return row_; }

private:
    std::size_t row_;
};

}  // namespace pdisp
