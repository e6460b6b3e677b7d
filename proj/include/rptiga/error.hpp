#pragma once

#include <stdexcept>
#include <string>

namespace rptiga {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Argument outside the admissible domain (knot range, thickness coordinate, ...).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Malformed or contradictory input (knot vectors, boundary specs, case configs).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Degenerate geometry: singular Jacobian or a failed inverse map.
class GeometryError : public Error {
public:
    using Error::Error;
};

/// Through-thickness quadrature did not settle.
class IntegrationError : public Error {
public:
    using Error::Error;
};

/// Linear or eigen solve failure.
class SolverError : public Error {
public:
    using Error::Error;
};

}  // namespace rptiga
