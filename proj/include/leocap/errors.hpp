#pragma once

#include <stdexcept>
#include <string>

namespace leocap {

/// Input outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Scenario or constellation configuration that cannot be simulated.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A numerical routine failed to reach its tolerance.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Root bracketing found no sign change in the search domain.
class RootNotFoundError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

} // namespace leocap
