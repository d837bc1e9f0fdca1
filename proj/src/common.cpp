#include "mscut/common.hpp"

namespace mscut {

std::string_view to_string(ErrorCategory category) {
  switch (category) {
  case ErrorCategory::Config:
    return "config";
  case ErrorCategory::Geometry:
    return "geometry";
  case ErrorCategory::Assembly:
    return "assembly";
  case ErrorCategory::Solver:
    return "solver";
  case ErrorCategory::Io:
    return "io";
  }
  return "unknown";
}

} // namespace mscut
