#pragma once

#include <stdexcept>
#include <string>

namespace tiltmut {

// Failure classes shared by the CLI (exit codes) and the service (error codes).
enum class ErrorCode {
  Internal = 1,
  Validation = 2,
  Infeasible = 3,
  OracleMismatch = 4,
  CapExceeded = 5,
};

inline const char* error_code_name(ErrorCode c) {
  switch (c) {
    case ErrorCode::Validation:
      return "ValidationError";
    case ErrorCode::Infeasible:
      return "InfeasibleMutation";
    case ErrorCode::OracleMismatch:
      return "OracleMismatch";
    case ErrorCode::CapExceeded:
      return "NotAdmissibleWithinCap";
    case ErrorCode::Internal:
      break;
  }
  return "InternalError";
}

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

class ValidationError : public Error {
 public:
  explicit ValidationError(const std::string& what)
      : Error(ErrorCode::Validation, what) {}
};

class NotAdmissibleWithinCap : public Error {
 public:
  explicit NotAdmissibleWithinCap(int cap)
      : Error(ErrorCode::CapExceeded,
              "ideal is not admissible within degree cap " +
                  std::to_string(cap)),
        cap_(cap) {}
  int cap() const noexcept { return cap_; }

 private:
  int cap_;
};

}  // namespace tiltmut
