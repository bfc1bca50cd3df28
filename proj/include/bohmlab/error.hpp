#ifndef BOHMLAB_ERROR_HPP
#define BOHMLAB_ERROR_HPP

#include <stdexcept>
#include <string>

namespace bohmlab {

enum class ErrorKind {
  invalid_grid,
  invalid_constant,
  non_finite,
  solver_diverged,
  configuration,
  unsupported_system,
  domain_exit,
  undefined_constraint,
  io,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_grid: return "invalid-grid";
    case ErrorKind::invalid_constant: return "invalid-constant";
    case ErrorKind::non_finite: return "non-finite";
    case ErrorKind::solver_diverged: return "solver-diverged";
    case ErrorKind::configuration: return "configuration";
    case ErrorKind::unsupported_system: return "unsupported-system";
    case ErrorKind::domain_exit: return "domain-exit";
    case ErrorKind::undefined_constraint: return "undefined-constraint";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

/// Every failure raised by the library carries a machine-checkable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace bohmlab

#endif  // BOHMLAB_ERROR_HPP
