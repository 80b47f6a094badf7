#pragma once

#include <stdexcept>
#include <string>

namespace phdmd {

/// Category attached to every exception thrown by the library. The C API maps
/// these onto its status codes.
enum class ErrorKind {
  InvalidArgument,  // shape mismatch, out-of-range parameter
  Config,           // malformed or inconsistent experiment configuration
  Io,               // missing file, parse failure
  Structure,        // pH structural invariant violated
  Numerical,        // singular solve, non-finite result
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

inline void require(bool cond, const std::string& what) {
  if (!cond) fail(ErrorKind::InvalidArgument, what);
}

}  // namespace phdmd
