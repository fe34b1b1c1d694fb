#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace cvsteady {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DimensionError : public Error {
public:
    using Error::Error;
};

class ValidationError : public Error {
public:
    ValidationError(std::string field, const std::string& what)
        : Error(field + ": " + what), field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Iterative kernel failed to converge (eigen-iteration, fixed point).
class NumericalError : public Error {
public:
    NumericalError(const std::string& what, std::size_t iterations)
        : Error(what), iterations_(iterations) {}

    std::size_t iterations() const noexcept { return iterations_; }

private:
    std::size_t iterations_;
};

class SingularMatrixError : public Error {
public:
    SingularMatrixError(const std::string& what, double pivot)
        : Error(what), pivot_(pivot) {}

    double pivot() const noexcept { return pivot_; }

private:
    double pivot_;
};

/// Raised when a Lyapunov solve is requested for a drift matrix that is not Hurwitz.
class StabilityError : public Error {
public:
    StabilityError(const std::string& what, double margin)
        : Error(what), margin_(margin) {}

    double margin() const noexcept { return margin_; }

private:
    double margin_;
};

class ConvergenceError : public NumericalError {
public:
    ConvergenceError(const std::string& what, std::size_t iterations, double residual)
        : NumericalError(what, iterations), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

class UnphysicalError : public Error {
public:
    using Error::Error;
};

/// Malformed configuration document; line and column are 1-based.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::size_t line, std::size_t column)
        : Error(what), line_(line), column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t line_;
    std::size_t column_;
};

/// Filesystem failure; carries the offending path.
class IoError : public Error {
public:
    IoError(const std::string& what, std::string path) : Error(what + ": " + path), path_(std::move(path)) {}

    const std::string& path() const noexcept { return path_; }

private:
    std::string path_;
};

}  // namespace cvsteady
