#pragma once

#include <stdexcept>
#include <string>

namespace phasemoments {

// Numbering matches pm_status in the C header.
enum class ErrorCode {
  invalid_argument = 1,
  domain = 2,
  convergence = 3,
  truncation = 4,
  parse = 5,
  schema = 6,
  io = 7,
  configuration = 8,
  verification = 9,
  internal = 10,
};

const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) fail(code, message);
}

}  // namespace phasemoments
