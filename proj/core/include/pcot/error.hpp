#pragma once

#include <stdexcept>
#include <string>

namespace pcot {

enum class ErrorKind {
  Overflow,
  DimMismatch,
  Unbounded,
  Parse,
  Validation,
  Io,
  Unsupported,
};

class Error : public std::runtime_error {
public:
  Error(ErrorKind kind, const std::string& msg)
      : std::runtime_error(msg), kind_(kind) {}
  ErrorKind kind() const { return kind_; }

private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& msg) {
  throw Error(kind, msg);
}

}  // namespace pcot
