#include "spike/errors.hpp"

namespace spike {

const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter: return "invalid-parameter";
    case ErrorKind::InvalidResolution: return "invalid-resolution";
    case ErrorKind::Precondition: return "precondition-violation";
    case ErrorKind::ChartRadius: return "chart-radius";
    case ErrorKind::OutOfChart: return "out-of-chart";
    case ErrorKind::Overflow: return "overflow";
    case ErrorKind::Bracket: return "bracketing";
    case ErrorKind::RayBracket: return "ray-bracket";
    case ErrorKind::ZeroField: return "zero-field";
    case ErrorKind::Fit: return "fit";
    case ErrorKind::LineSearch: return "line-search";
    case ErrorKind::Solver: return "solver";
    case ErrorKind::Assembly: return "assembly";
    case ErrorKind::Resolution: return "resolution";
    case ErrorKind::DegenerateAxis: return "degenerate-axis";
    case ErrorKind::Format: return "format";
  }
  return "unknown";
}

bool is_usage_error(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParameter:
    case ErrorKind::InvalidResolution:
    case ErrorKind::Precondition:
    case ErrorKind::ChartRadius:
    case ErrorKind::Bracket:
    case ErrorKind::Format:
      return true;
    default:
      return false;
  }
}

}  // namespace spike
