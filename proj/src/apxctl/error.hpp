#pragma once

#include <stdexcept>
#include <string>

namespace apxctl {

/// Failure categories; the numeric values double as CLI exit codes.
enum class ErrorKind {
  validation = 1,
  numerical = 2,
  check_failed = 3,
  invalid_argument = 4,
  io = 5,
  internal = 6,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool condition, const std::string& what) {
  if (!condition) fail(ErrorKind::invalid_argument, what);
}

}  // namespace apxctl
