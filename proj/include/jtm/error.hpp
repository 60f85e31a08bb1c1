#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace jtm {

enum class ErrorCode {
  kSyntax,
  kShape,
  kNonFinite,
  kTooShort,
  kOutOfRange,
  kEmptyGrid,
  kShapeMismatch,
  kIdMismatch,
  kInvalidScore,
  kDimMismatch,
  kIo,
  kInvalidArgument,
};

std::string_view to_string(ErrorCode code);

// Single exception type for every module; the code identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace jtm
