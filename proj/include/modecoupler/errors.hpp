#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace modecoupler {

// Base class for every error thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what_arg) : std::runtime_error(what_arg) {}
};

// Invalid models, arguments, or input text.  Mapped to CLI exit code 1.
class DomainError : public Error {
public:
    using Error::Error;
};

class InvalidModelError : public DomainError {
public:
    using DomainError::DomainError;
};

class UnsupportedModelError : public DomainError {
public:
    using DomainError::DomainError;
};

class RangeError : public DomainError {
public:
    using DomainError::DomainError;
};

class InvalidInputError : public DomainError {
public:
    using DomainError::DomainError;
};

// Failure while parsing text input; carries the 1-based source line.
class ParseError : public DomainError {
public:
    ParseError(const std::string& what_arg, std::size_t line)
        : DomainError(what_arg + " (line " + std::to_string(line) + ")"), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Numerical failures (non-convergence, singular systems).  Mapped to CLI exit code 2.
class NumericalError : public Error {
public:
    explicit NumericalError(const std::string& what_arg, double residual = 0.0)
        : Error(what_arg), residual_(residual) {}

    // Magnitude of whatever quantity failed to converge or vanish.
    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

// (omega*I - H) was numerically singular at the requested frequency.
class SingularResponseError : public NumericalError {
public:
    explicit SingularResponseError(double omega_ghz, const std::string& context = "")
        : NumericalError("response matrix singular at " + std::to_string(omega_ghz) + " GHz" +
                         (context.empty() ? "" : " (" + context + ")")),
          omega_(omega_ghz) {}

    double omega() const noexcept { return omega_; }

private:
    double omega_;
};

}  // namespace modecoupler
