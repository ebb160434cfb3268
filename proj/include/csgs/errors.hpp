#pragma once

#include <stdexcept>
#include <string>

namespace csgs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A GridSpec, ProblemSpec or option violates its range constraints.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

/// Grid functions or reports that do not live on the same grid.
class GridMismatch : public Error {
public:
    using Error::Error;
};

class ZeroField : public Error {
public:
    ZeroField() : Error("field pair is identically zero; no fibering scale exists") {}
};

/// mu*|u|_p^p + |v|_q^q vanishes, so the fibering equation has no positive root.
class DegenerateNonlinearity : public Error {
public:
    using Error::Error;
};

/// The coupled quadratic form is not positive; the potentials do not satisfy the coupling bound.
class NonpositiveQuadraticForm : public Error {
public:
    using Error::Error;
};

class NonFiniteValue : public Error {
public:
    using Error::Error;
};

class ConvergenceFailure : public Error {
public:
    using Error::Error;
};

/// Malformed field file, config file or other persisted artifact.
class FormatError : public Error {
public:
    using Error::Error;
};

/// Config value missing, malformed or out of range; the message names "[section] key".
class ConfigError : public FormatError {
public:
    using FormatError::FormatError;
};

}  // namespace csgs
