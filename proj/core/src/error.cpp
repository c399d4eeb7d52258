#include "regionplan/error.hpp"

namespace regionplan {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kIo: return "io error";
    case ErrorCode::kUnsupportedFormat: return "unsupported format";
    case ErrorCode::kMalformedHeader: return "malformed header";
    case ErrorCode::kDimensionTooSmall: return "dimension too small";
    case ErrorCode::kTruncatedPayload: return "truncated payload";
    case ErrorCode::kDimensionMismatch: return "dimension mismatch";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kInvalidInstance: return "invalid instance";
    case ErrorCode::kEmptyTree: return "empty tree";
    case ErrorCode::kRegionExhausted: return "region exhausted";
    case ErrorCode::kNoPath: return "no path";
    case ErrorCode::kRetryBudgetExhausted: return "retry budget exhausted";
    case ErrorCode::kManifest: return "manifest error";
    case ErrorCode::kMissingRegion: return "missing region file";
    case ErrorCode::kEmptyInput: return "empty input";
  }
  return "unknown error";
}

}  // namespace regionplan
