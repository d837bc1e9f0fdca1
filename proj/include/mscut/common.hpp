#pragma once

#include <Eigen/Core>

#include <stdexcept>
#include <string>
#include <string_view>

namespace mscut {

using Vec2 = Eigen::Vector2d;

/// Coarse failure classes reported by the command line driver.
enum class ErrorCategory { Config, Geometry, Assembly, Solver, Io };

std::string_view to_string(ErrorCategory category);

class Error : public std::runtime_error {
public:
  Error(ErrorCategory category, const std::string &what)
      : std::runtime_error(what), category_(category) {}

  ErrorCategory category() const noexcept { return category_; }

private:
  ErrorCategory category_;
};

inline Error config_error(const std::string &what) {
  return Error(ErrorCategory::Config, what);
}
inline Error geometry_error(const std::string &what) {
  return Error(ErrorCategory::Geometry, what);
}
inline Error assembly_error(const std::string &what) {
  return Error(ErrorCategory::Assembly, what);
}
inline Error solver_error(const std::string &what) {
  return Error(ErrorCategory::Solver, what);
}
inline Error io_error(const std::string &what) {
  return Error(ErrorCategory::Io, what);
}

} // namespace mscut
