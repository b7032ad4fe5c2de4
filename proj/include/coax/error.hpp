#pragma once

#include <stdexcept>
#include <string>

namespace coax {

enum class ErrorCode {
  InvalidArgument,
  Io,
  Parse,
  Degenerate,
  Capacity,
  Correctness,
};

// Base exception for the library. The C API maps `code()` onto coax_status.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Raised when an input admits no meaningful answer (zero cell width, all-equal
// regressors, nothing above a density threshold).
class DegenerateError : public Error {
 public:
  explicit DegenerateError(const std::string& what)
      : Error(ErrorCode::Degenerate, what) {}
};

}  // namespace coax
