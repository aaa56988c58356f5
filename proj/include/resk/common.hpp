#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace resk {

using Value = std::uint32_t;

// Never produced by interning; used for pattern constants absent from a database.
inline constexpr Value kNoValue = UINT32_MAX;

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error("line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + what),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

// Witness cap or branch-node cap hit.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

}  // namespace resk
