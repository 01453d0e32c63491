#pragma once

#include <stdexcept>
#include <string>

namespace mtmc {

/// Raised when an input file cannot be decoded (bad syntax, wrong field
/// count, non-numeric text). Carries the offending line number when known.
class ParseError : public std::runtime_error {
public:
    explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
    ParseError(const std::string& file, std::size_t line, const std::string& msg)
        : std::runtime_error(file + ":" + std::to_string(line) + ": " + msg) {}
};

/// Raised when decoded data violates a documented invariant (duplicate keys,
/// non-positive box sizes, probability vectors that do not sum to one, ...).
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace mtmc
