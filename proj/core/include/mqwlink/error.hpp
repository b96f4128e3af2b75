#pragma once

#include <stdexcept>
#include <string>

namespace mqwlink {

/// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid configuration, parameters or arguments (CLI exit code 2).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Argument outside the mathematical domain of a model relation.
class DomainError : public ConfigError {
public:
    using ConfigError::ConfigError;
};

/// Failure while integrating or evaluating a trajectory (CLI exit code 3).
class SimulationError : public Error {
public:
    using Error::Error;
};

/// A step produced a negative carrier or photon density; dt is too large.
class NegativeDensityError : public SimulationError {
public:
    enum class Quantity { carrier, photon };

    NegativeDensityError(Quantity which, double time)
        : SimulationError(std::string(which == Quantity::carrier ? "negative carrier density"
                                                                  : "negative photon density") +
                          " at t=" + std::to_string(time) + " s (step size too large)"),
          which_(which),
          time_(time) {}

    Quantity which() const noexcept { return which_; }
    double time() const noexcept { return time_; }

private:
    Quantity which_;
    double time_;
};

class NoConvergenceError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

class BelowThresholdError : public DomainError {
public:
    using DomainError::DomainError;
};

/// Trace too short or too coarse to build an eye.
class InsufficientDataError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// One of the two logic levels has no samples in the decision window.
class MissingLevelError : public SimulationError {
public:
    using SimulationError::SimulationError;
};

/// No operating point satisfies the constraints (CLI exit code 4).
class InfeasibleError : public Error {
public:
    using Error::Error;
};

}  // namespace mqwlink
