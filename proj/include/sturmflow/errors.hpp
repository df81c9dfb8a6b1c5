#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace sturmflow {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Input matrix is not Hermitian within the symmetry tolerance.
class SymmetryError : public Error {
public:
    using Error::Error;
};

/// Vectors handed to a form restriction are linearly dependent.
class DegenerateBasisError : public Error {
public:
    using Error::Error;
};

/// Parameter outside its admissible range (e.g. lambda outside [0,1]).
class DomainError : public Error {
public:
    using Error::Error;
};

/// A problem failed validation. Each diagnostic names the offending entry.
class ValidationError : public Error {
public:
    explicit ValidationError(std::vector<std::string> diagnostics);
    const std::vector<std::string>& diagnostics() const noexcept { return diagnostics_; }

private:
    std::vector<std::string> diagnostics_;
};

/// Malformed configuration file.
class ParseError : public Error {
public:
    using Error::Error;
};

/// Step-size underflow or other integrator failure.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Rank-deficient frame, non-transverse chart, or no complement found.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Path endpoint lies on the singular variety of the reference plane.
class AdmissibilityError : public Error {
public:
    using Error::Error;
};

/// Index requested at a lambda where the kernel is trivial.
class EmptyKernelError : public Error {
public:
    using Error::Error;
};

/// The form is degenerate at the endpoint lambda = 1 (or lambda = 0).
class EndpointDegeneracyError : public Error {
public:
    using Error::Error;
};

/// A crossing whose crossing form is singular. Callers must regularize.
class NonRegularCrossingError : public Error {
public:
    NonRegularCrossingError(const std::string& what, std::vector<double> lambdas)
        : Error(what), lambdas_(std::move(lambdas)) {}
    const std::vector<double>& lambdas() const noexcept { return lambdas_; }

private:
    std::vector<double> lambdas_;
};

/// Two routes that must agree (analytic/numeric, inertia/crossings) did not.
class InconsistencyError : public Error {
public:
    using Error::Error;
};

/// No conjugate-point-free initial interval could be certified.
class GuardError : public Error {
public:
    using Error::Error;
};

/// Galerkin indices did not stabilize within the allowed basis sizes.
class ConvergenceError : public Error {
public:
    using Error::Error;
};

/// Endpoints stayed degenerate after every regularization attempt.
class RegularizationError : public Error {
public:
    using Error::Error;
};

}  // namespace sturmflow
