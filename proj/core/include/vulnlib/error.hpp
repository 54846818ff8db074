#pragma once

#include <stdexcept>
#include <string>

namespace vulnlib {

/// Broad failure categories. The CLI maps each to its own exit code and the
/// HTTP service maps the session-related ones to status codes.
enum class ErrorKind {
  kParse,
  kValidation,
  kIo,
  kConfig,
  kModelMismatch,
  kNumeric,
  kNotFound,
  kConflict,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kParse: return "parse error";
    case ErrorKind::kValidation: return "validation error";
    case ErrorKind::kIo: return "i/o error";
    case ErrorKind::kConfig: return "config error";
    case ErrorKind::kModelMismatch: return "model mismatch";
    case ErrorKind::kNumeric: return "numeric error";
    case ErrorKind::kNotFound: return "not found";
    case ErrorKind::kConflict: return "conflict";
  }
  return "error";
}

}  // namespace vulnlib
