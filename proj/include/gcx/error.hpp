#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gcx {

/// Base class of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed textual input (XML, grammar, SLP, automaton or query text).
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::size_t column)
      : Error(what + " (line " + std::to_string(line) + ", column " +
              std::to_string(column) + ")"),
        line_(line),
        column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

 private:
  std::size_t line_;
  std::size_t column_;
};

/// Query construct outside the supported XPath fragment.
class UnsupportedFeature : public Error {
 public:
  using Error::Error;
};

/// An expansion or automaton construction exceeded its configured bound.
class LimitExceeded : public Error {
 public:
  using Error::Error;
};

/// A structure violates one or more of its invariants.
class ValidationError : public Error {
 public:
  explicit ValidationError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}

  const std::vector<std::string>& violations() const noexcept { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string out = "validation failed";
    for (const auto& s : v) {
      out += "\n  ";
      out += s;
    }
    return out;
  }

  std::vector<std::string> violations_;
};

}  // namespace gcx
