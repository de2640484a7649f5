#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace pwdcl {

/// Precondition or value-range failure on a public operation.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Zero-norm prediction or target in a normalized correlation.
class DegenerateNorm : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DegenerateVariance : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A peak without a half-maximum crossing on one side.
class OneSidedPeak : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Optimizer received a non-finite gradient.
class Divergence : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed binary file. `offset` is the byte position where decoding failed.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t offset)
        : std::runtime_error(what + " (at byte offset " + std::to_string(offset) + ")"),
          offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Config text error; `line` is 1-based, 0 when not tied to a line.
class ParseError : public std::runtime_error {
public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(line ? "line " + std::to_string(line) + ": " + what : what),
          line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

} // namespace pwdcl
