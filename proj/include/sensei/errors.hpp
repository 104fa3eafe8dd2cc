#ifndef SENSEI_ERRORS_HPP
#define SENSEI_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sensei {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not conform.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// Input is structurally unusable (empty graph, zero-degree node, ...).
class DegenerateInputError : public Error {
public:
    using Error::Error;
};

/// A documented precondition of the call was violated.
class PreconditionError : public Error {
public:
    using Error::Error;
};

/// Feature layout of a query does not match the trained model.
class SchemaError : public Error {
public:
    using Error::Error;
};

/// Too few usable training groups.
class InsufficientDataError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents.
class ParseError : public Error {
public:
    using Error::Error;
};

} // namespace sensei

#endif // SENSEI_ERRORS_HPP
