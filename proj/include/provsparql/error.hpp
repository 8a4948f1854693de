#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace provsparql {

/// Raised by the N-Quads and query parsers. Line is 0 when the input is not
/// line oriented (queries report a byte offset in `column`).
class SyntaxError : public std::runtime_error {
public:
  SyntaxError(std::size_t line, std::size_t column, const std::string& message)
      : std::runtime_error(format(line, column, message)),
        line_(line),
        column_(column) {}

  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

private:
  static std::string format(std::size_t line, std::size_t column,
                            const std::string& message) {
    if (line == 0) {
      return "syntax error at offset " + std::to_string(column) + ": " + message;
    }
    return "syntax error at " + std::to_string(line) + ":" +
           std::to_string(column) + ": " + message;
  }

  std::size_t line_;
  std::size_t column_;
};

class UnknownPrefix : public std::runtime_error {
public:
  explicit UnknownPrefix(const std::string& name)
      : std::runtime_error("unknown prefix '" + name + ":'"), name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class ProjectionError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class SchemaMismatch : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

class UnknownAttribute : public std::runtime_error {
public:
  explicit UnknownAttribute(const std::string& attr)
      : std::runtime_error("unknown attribute '" + attr + "'") {}
};

class UnboundIdentifier : public std::runtime_error {
public:
  explicit UnboundIdentifier(const std::string& name)
      : std::runtime_error("no value assigned to identifier '" + name + "'"),
        name_(name) {}
  const std::string& name() const { return name_; }

private:
  std::string name_;
};

class UnsupportedFilterAtom : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace provsparql
