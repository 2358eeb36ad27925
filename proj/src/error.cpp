#include "phasemoments/error.hpp"

namespace phasemoments {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::invalid_argument: return "invalid argument";
    case ErrorCode::domain: return "domain error";
    case ErrorCode::convergence: return "convergence failure";
    case ErrorCode::truncation: return "truncation error";
    case ErrorCode::parse: return "parse error";
    case ErrorCode::schema: return "schema error";
    case ErrorCode::io: return "i/o error";
    case ErrorCode::configuration: return "configuration error";
    case ErrorCode::verification: return "verification failure";
    case ErrorCode::internal: return "internal error";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace phasemoments
