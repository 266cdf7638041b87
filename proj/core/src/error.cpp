#include "fastmesh/error.hpp"

namespace fastmesh {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMalformedInput: return "malformed-input";
    case ErrorCode::kOutOfRange: return "out-of-range";
    case ErrorCode::kDegenerateInput: return "degenerate-input";
    case ErrorCode::kPrecondition: return "precondition";
    case ErrorCode::kMalformedSequence: return "malformed-sequence";
    case ErrorCode::kShapeMismatch: return "shape-mismatch";
    case ErrorCode::kDivergence: return "divergence";
    case ErrorCode::kIo: return "io";
  }
  return "unknown";
}

void fail(ErrorCode code, const std::string& message) {
  throw Error(code, std::string(to_string(code)) + ": " + message);
}

}  // namespace fastmesh
