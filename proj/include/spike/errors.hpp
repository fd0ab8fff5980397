#pragma once

#include <stdexcept>
#include <string>

namespace spike {

/// Failure categories. The CLI maps usage-type kinds to exit code 2 and
/// numerical kinds to exit code 1.
enum class ErrorKind {
  InvalidParameter,
  InvalidResolution,
  Precondition,
  ChartRadius,
  OutOfChart,
  Overflow,
  Bracket,
  RayBracket,
  ZeroField,
  Fit,
  LineSearch,
  Solver,
  Assembly,
  Resolution,
  DegenerateAxis,
  Format,
};

const char* to_string(ErrorKind kind);

/// True for kinds that signal bad input rather than a numerical failure.
bool is_usage_error(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Parse failure in one of the ASCII formats; always carries a 1-based line.
class FormatError : public Error {
 public:
  FormatError(std::string file_kind, int line, const std::string& message)
      : Error(ErrorKind::Format, file_kind + " line " + std::to_string(line) + ": " + message),
        file_kind_(std::move(file_kind)),
        line_(line) {}

  const std::string& file_kind() const noexcept { return file_kind_; }
  int line() const noexcept { return line_; }

 private:
  std::string file_kind_;
  int line_;
};

}  // namespace spike
