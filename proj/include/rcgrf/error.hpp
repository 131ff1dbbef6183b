#pragma once

#include <stdexcept>
#include <string>

namespace rcgrf {

enum class ErrorCode {
  kShape,
  kParameter,
  kData,
  kParse,
  kSchema,
  kIo,
  kConfig,
  kSequenceTooShort,
  kDegenerateFeature,
  kSplitTooSmall,
  kTrainingDiverged,
};

/// Stable machine-readable name, e.g. "shape_error".
const char* error_code_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace rcgrf
