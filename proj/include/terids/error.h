#pragma once

#include <stdexcept>
#include <string>

namespace terids {

enum class ErrorCode {
  kEmptyValue,
  kOutOfOrderArrival,
  kIncompleteTuple,
  kDeterminantMissing,
  kNoRulesFound,
  kNoSupportingSample,
  kImputationFailed,
  kEmptyDomain,
  kDuplicateTuple,
  kUnknownTuple,
  kConfigError,
  kIoError,
  kInvalidRate,
  kParseError,
};

const char* ErrorCodeName(ErrorCode code);

// All recoverable failures in the library surface as this exception type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace terids
