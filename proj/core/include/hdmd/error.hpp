#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hdmd {

// Base of every error thrown by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text (CSV, JSON spec files).
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Inputs violate a documented precondition.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Matrix or window dimensions are incompatible.
class ShapeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

// Data carry no usable information (e.g. all singular values below the floor).
class DegenerateDataError : public Error {
public:
    using Error::Error;
};

// A numerical kernel failed to converge.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace hdmd
