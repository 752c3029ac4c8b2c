#ifndef JUMPKIT_ERRORS_HPP
#define JUMPKIT_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace jumpkit {

// Precondition or type-invariant violated by the caller.
struct ContractViolation : std::runtime_error {
    explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: non-finite values, underflow, unmet tolerance, ...
struct NumericError : std::runtime_error {
    explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

// Integrator could not meet its accuracy bound before the step floor.
struct ConvergenceError : NumericError {
    explicit ConvergenceError(const std::string& what) : NumericError(what) {}
};

// Requested time window is invalid for the model (kernel revival, undecayed tail).
struct WindowError : NumericError {
    explicit WindowError(const std::string& what) : NumericError(what) {}
};

// Stochastic stepping could not keep per-step jump probabilities small.
struct StepSizeError : NumericError {
    explicit StepSizeError(const std::string& what) : NumericError(what) {}
};

// Not enough data for the requested statistic.
struct StatisticsError : NumericError {
    explicit StatisticsError(const std::string& what) : NumericError(what) {}
};

// Bad or missing configuration key.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Filesystem failure while reading or writing results.
struct IoError : std::runtime_error {
    explicit IoError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace jumpkit

#endif
