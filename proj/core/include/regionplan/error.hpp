#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace regionplan {

enum class ErrorCode {
  kIo,
  kUnsupportedFormat,  // wrong netpbm magic
  kMalformedHeader,
  kDimensionTooSmall,
  kTruncatedPayload,
  kDimensionMismatch,
  kInvalidArgument,
  kInvalidInstance,
  kEmptyTree,
  kRegionExhausted,
  kNoPath,
  kRetryBudgetExhausted,
  kManifest,
  kMissingRegion,
  kEmptyInput,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Every failure in the library is reported as an Error carrying a code, so
/// callers can branch on the kind without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace regionplan
