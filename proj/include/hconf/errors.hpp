#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hconf {

/// Unknown variable, mismatched variable sets, or an argument outside an
/// operation's domain.
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Gap or overlap between the domains of two trajectories being joined.
class ConcatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Boundary valuations of two trajectories differ by more than the merge
/// tolerance.
class StateMismatchError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trace, a-trace or trace file violates a structural invariant.
class TraceFormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Automaton definition violates a model invariant (partitions, invariant of
/// a start or target state, missing flow).
class ModelError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NotEnabledError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NondeterminismError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Expression evaluation failure (division by zero, non-finite result).
class NumericError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Syntax or semantic error in textual input, with a 1-based position.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& msg, std::size_t line, std::size_t column)
      : std::runtime_error(format(msg, line, column)), line_(line), column_(column) {}

  std::size_t line() const noexcept { return line_; }
  std::size_t column() const noexcept { return column_; }

  /// Same position, message prefixed with the file it came from.
  static ParseError in_file(const std::string& file, const ParseError& e) {
    return ParseError(file + ": " + e.what(), e.line_, e.column_, 0);
  }

 private:
  ParseError(const std::string& full, std::size_t line, std::size_t column, int)
      : std::runtime_error(full), line_(line), column_(column) {}

  static std::string format(const std::string& msg, std::size_t line, std::size_t column) {
    return "line " + std::to_string(line) + ", column " + std::to_string(column) + ": " + msg;
  }

  std::size_t line_;
  std::size_t column_;
};

}  // namespace hconf
