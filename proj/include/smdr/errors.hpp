#pragma once

#include <stdexcept>
#include <string>

namespace smdr {

// Error categories map one-to-one onto the C API status codes and the
// CLI exit codes (usage = 2, data = 3, numerical = 4).
enum class ErrorKind { InvalidArgument, Io, Data, Numerical };

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace smdr
