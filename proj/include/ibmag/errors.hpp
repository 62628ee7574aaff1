#pragma once

#include <stdexcept>
#include <string>

namespace ibmag {

/// Base of every error thrown by the library. The CLI maps these to exit code 2.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Query outside the valid domain of a curve, stroke or ratio.
class DomainError : public Error {
public:
    using Error::Error;
};

/// Curve fit did not converge or produced an unphysical parameter.
class FitError : public Error {
public:
    using Error::Error;
};

/// Curve shape violates a convexity / monotonicity requirement.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// No catalog snap keeps the spring characteristic below the magnet curve.
class CatalogError : public Error {
public:
    using Error::Error;
};

/// Inconsistent unit configuration (weights, stroke vs curve domain).
class ConfigError : public Error {
public:
    using Error::Error;
};

/// Requested evaluation mode lacks a required parameter.
class ModeError : public Error {
public:
    using Error::Error;
};

/// Operation needs at least one sample.
class EmptyProfile : public Error {
public:
    using Error::Error;
};

/// Malformed input file (CSV or key-value config).
class ParseError : public Error {
public:
    using Error::Error;
};

}  // namespace ibmag
