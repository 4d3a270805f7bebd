#pragma once

#include <stdexcept>
#include <string>

namespace fsi {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Array or grid sizes that do not match.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Input outside the mathematical domain of an operation (nonpositive h, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// The deformation handed to a solve violates the admissibility bounds (alpha <= h <= 1/alpha, K).
class InadmissibleDeformation : public DomainError {
public:
    using DomainError::DomainError;
};

/// Linear solver failed to reach its residual contract.
class SolverError : public Error {
public:
    SolverError(const std::string& what, double residual)
        : Error(what + " (relative residual " + std::to_string(residual) + ")"), residual_(residual) {}
    [[nodiscard]] double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// A deformation left the admissible set (bounds on h, slope/speed bound K, or the ball B_alpha).
class AdmissibilityError : public Error {
public:
    AdmissibilityError(const std::string& what, int iterate = -1) : Error(what), iterate_(iterate) {}
    /// Index of the offending fixed-point iterate, or -1 outside the global iteration.
    [[nodiscard]] int iterate() const noexcept { return iterate_; }

private:
    int iterate_;
};

/// Malformed or invalid configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

#define FSI_REQUIRE(cond, ErrType, msg)      \
    do {                                     \
        if (!(cond)) throw ErrType(msg);     \
    } while (false)

}  // namespace fsi
