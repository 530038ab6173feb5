#pragma once

#include <stdexcept>
#include <string>

namespace saddle {

/// Base class of every error raised by the library.
class Error : public std::runtime_error
{
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input document.
class ParseError : public Error
{
public:
    using Error::Error;
};

/// Structurally readable input that violates a model invariant.
class ValidationError : public Error
{
public:
    using Error::Error;
};

/// Argument outside the domain of an operation.
class DomainError : public Error
{
public:
    using Error::Error;
};

/// The configured budget of developed triangles was exhausted.
class ResourceLimitError : public Error
{
public:
    using Error::Error;
};

/// A filter was asked for a region beyond the spectrum's completeness radius.
class IncompleteSpectrumError : public Error
{
public:
    using Error::Error;
};

/// Successive quadrature refinements failed to agree.
class NonConvergenceError : public Error
{
public:
    using Error::Error;
};

} // namespace saddle
