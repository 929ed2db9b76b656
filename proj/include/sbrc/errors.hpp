#pragma once

#include <stdexcept>
#include <string>

namespace sbrc {

// Base of every error raised by the library. The CLI maps subclasses onto
// exit codes (validation 2, solver 3, I/O 4).
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad input to a function: wrong shape, out-of-range integer, etc.
class ArgumentError : public Error {
public:
    using Error::Error;
};

// Argument outside the mathematical domain of a function (e.g. omega < 0).
class DomainError : public ArgumentError {
public:
    using ArgumentError::ArgumentError;
};

// Configuration failed validation. `field` carries the dotted key path.
class ValidationError : public ArgumentError {
public:
    ValidationError(std::string field, const std::string& what)
        : ArgumentError(field + ": " + what), field_(std::move(field)) {}
    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

// Solver-side failures.
class SolverError : public Error {
public:
    using Error::Error;
};

class DegeneracyError : public SolverError {
public:
    using SolverError::SolverError;
};

class ConvergenceError : public SolverError {
public:
    using SolverError::SolverError;
};

class CapacityError : public SolverError {
public:
    using SolverError::SolverError;
};

class IntegrationError : public SolverError {
public:
    IntegrationError(const std::string& what, double time_reached)
        : SolverError(what + " (t = " + std::to_string(time_reached) + ")"),
          time_reached_(time_reached) {}
    double time_reached() const noexcept { return time_reached_; }

private:
    double time_reached_;
};

// Physically invalid moments (uncertainty relation violated).
class InvalidMomentsError : public SolverError {
public:
    using SolverError::SolverError;
};

class IoError : public Error {
public:
    using Error::Error;
};

}  // namespace sbrc
