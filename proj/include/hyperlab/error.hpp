#pragma once

#include <stdexcept>
#include <string>

namespace hyperlab {

enum class ErrorKind {
  invalid_argument,
  shape_mismatch,
  numeric,
  domain,
  blow_up,
  range,
  convergence,
  unsupported,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::shape_mismatch: return "shape-mismatch";
    case ErrorKind::numeric: return "numeric-error";
    case ErrorKind::domain: return "domain-error";
    case ErrorKind::blow_up: return "blow-up";
    case ErrorKind::range: return "range-error";
    case ErrorKind::convergence: return "convergence-error";
    case ErrorKind::unsupported: return "unsupported";
  }
  return "unknown";
}

/// Every failure raised by the library carries one of the kinds above so
/// that callers (the CLI in particular) can map it to an exit status.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what),
        kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) fail(kind, what);
}

}  // namespace hyperlab
