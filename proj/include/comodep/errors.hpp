#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace comodep {

// Base of every error thrown by the library. Callers that only care about
// "something went wrong" catch this; the CLI maps the concrete subclasses
// onto exit codes.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Bad parameters or a contract violation by the caller.
class InvalidArgument : public Error {
public:
    using Error::Error;
};

// A moment required by the computation diverges (e.g. Pareto shape <= order).
class MomentUndefined : public Error {
public:
    using Error::Error;
};

class QuadratureNotConverged : public Error {
public:
    using Error::Error;
};

class DimensionUnsupported : public Error {
public:
    using Error::Error;
};

// Ratio measures whose denominator vanishes (constant columns, centred odd
// Gaussian moments, ...).
class DegenerateDenominator : public Error {
public:
    using Error::Error;
};

class InadmissibleCopula : public Error {
public:
    using Error::Error;
};

class ModelNotSamplable : public Error {
public:
    using Error::Error;
};

// CSV ingestion failure. Row and column are 1-based and refer to the file,
// header included.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t row, std::size_t column)
        : Error(what + " (row " + std::to_string(row) + ", column " + std::to_string(column) + ")"),
          row_(row), column_(column) {}

    std::size_t row() const noexcept { return row_; }
    std::size_t column() const noexcept { return column_; }

private:
    std::size_t row_;
    std::size_t column_;
};

}  // namespace comodep
