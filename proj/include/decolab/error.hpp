#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace decolab {

enum class ErrorCode {
  invalid_argument,
  dimension_mismatch,
  grid_mismatch,
  degenerate_bath,
  dimension_cap,
  range,
  insufficient_data,
  unsupported,
  resolution,
  integration,
  step_size,
  reference_convergence,
  undefined_dissipation,
};

std::string_view to_string(ErrorCode code);

/// Base of every error raised by the library. The code identifies the
/// failure; the subclass tells whether the inputs were at fault
/// (ValidationError) or the numerics could not meet their tolerance
/// (NumericalError).
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& msg)
      : std::runtime_error(msg), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ValidationError : public Error {
 public:
  using Error::Error;
};

class NumericalError : public Error {
 public:
  using Error::Error;
};

inline void require(bool cond, ErrorCode code, const std::string& msg) {
  if (!cond) throw ValidationError(code, msg);
}

}  // namespace decolab
