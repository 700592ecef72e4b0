#pragma once

#include <stdexcept>
#include <string>

namespace ambilab {

// Base class for all ambilab errors.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// Invalid argument or violated precondition (bad parameter range, empty input).
class DomainError : public Error {
public:
    explicit DomainError(const std::string& what) : Error(what) {}
};

// Integer overflow in exact rational arithmetic.
class OverflowError : public Error {
public:
    explicit OverflowError(const std::string& what) : Error(what) {}
};

// Malformed input row or value while reading delimited text.
class ParseError : public Error {
public:
    ParseError(std::size_t line, const std::string& column, const std::string& reason)
        : Error("parse error at line " + std::to_string(line) + ", column '" + column +
                "': " + reason),
          line(line), column(column), reason(reason) {}

    std::size_t line;
    std::string column;
    std::string reason;
};

// A required column binding is missing from the schema map or file header.
class SchemaError : public Error {
public:
    explicit SchemaError(const std::string& what) : Error(what) {}
};

// Collinear regression design; message names the offending terms.
class RankError : public Error {
public:
    explicit RankError(const std::string& what) : Error(what) {}
};

// Fewer than two clusters for clustered inference.
class ClusterError : public Error {
public:
    explicit ClusterError(const std::string& what) : Error(what) {}
};

// Iterative demeaning failed to reach tolerance within the iteration cap.
class ConvergenceError : public Error {
public:
    explicit ConvergenceError(const std::string& what) : Error(what) {}
};

// Numerically singular covariance block in a joint test.
class SingularError : public Error {
public:
    explicit SingularError(const std::string& what) : Error(what) {}
};

// Fitted curvature has no interior maximum.
class ShapeError : public Error {
public:
    explicit ShapeError(const std::string& what) : Error(what) {}
};

// Zero-variance residuals where a correlation was requested.
class DegenerateError : public Error {
public:
    explicit DegenerateError(const std::string& what) : Error(what) {}
};

} // namespace ambilab
