#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace timesplit {

/// Base class of all library errors.
class Error : public std::runtime_error {
 public:
    using std::runtime_error::runtime_error;
};

/// Ill-formed model: open network, divergent urgent chain, timer
/// deactivation, exceeded state-space caps.
class ModelError : public Error {
 public:
    using Error::Error;
};

/// Lexical, syntactic or semantic error in a Kepler DFT file.
class ParseError : public Error {
 public:
    ParseError(const std::string& message, std::size_t line, std::size_t column)
        : Error(std::to_string(line) + ":" + std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}

    std::size_t line() const noexcept { return line_; }
    std::size_t column() const noexcept { return column_; }

 private:
    std::size_t line_;
    std::size_t column_;
};

}  // namespace timesplit
