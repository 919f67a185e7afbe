#pragma once

#include <stdexcept>
#include <string>

namespace sparsegnn {

/// Base class for all sparsegnn errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Operand dimensions do not match the operation's contract.
class ShapeError : public Error {
public:
    using Error::Error;
};

/// A kernel was requested that cannot serve the given operands
/// (wrong fixed K, non-Sum reduction, K outside the specialization set).
class DispatchError : public Error {
public:
    using Error::Error;
};

/// Invalid parameter or precondition violation outside of shapes.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A backward pass was given a tape that does not match its inputs.
class TapeError : public Error {
public:
    using Error::Error;
};

/// A file could not be opened or read.
class IoError : public Error {
public:
    using Error::Error;
};

/// Malformed file contents. Carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, long line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

    long line() const noexcept { return line_; }

private:
    long line_;
};

/// An internal consistency check failed (e.g. two kernels disagreed).
class InternalError : public Error {
public:
    using Error::Error;
};

} // namespace sparsegnn
