#pragma once

#include <stdexcept>
#include <string>

namespace hawkes_impact {

/// Argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Branching ratio at or above one: the Hawkes resolvent series diverges.
class InstabilityError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// The near-instability schedule cannot be realised at the requested horizon.
class ScheduleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A fixed-point iteration failed to reach its tolerance.
class IterationError : public std::runtime_error {
public:
    IterationError(const std::string& what, double residual)
        : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"),
          residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Sum-of-exponentials fit produced an unusable kernel.
class ApproximationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Regression had too few usable points.
class FitError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Bad command line or experiment configuration.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace hawkes_impact
