#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ivdep {

/// Machine-readable error categories surfaced by the library and the CLI.
enum class ErrorCode {
  invalid_argument,
  malformed_input,
  dimension_mismatch,
  invalid_distribution,
  division_by_zero,
  out_of_range,
  infeasible,
  numerical_failure,
  unsupported,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ivdep
