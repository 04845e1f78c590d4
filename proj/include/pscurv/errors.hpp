#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pscurv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed expression text. `offset()` is the 0-based byte offset of the
/// offending token.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Evaluation outside the domain of the function (log at 0, division by 0).
class DomainError : public Error {
public:
    using Error::Error;
};

/// Iterations that fail to converge, degenerate frames, failed certificates.
class NumericError : public Error {
public:
    using Error::Error;
};

/// Bad user input that is not an expression syntax error.
class ArgumentError : public Error {
public:
    using Error::Error;
};

}  // namespace pscurv
