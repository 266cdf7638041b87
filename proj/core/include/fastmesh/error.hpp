#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace fastmesh {

enum class ErrorCode {
  kMalformedInput,     // unparsable text, bad token ids, bad file formats
  kOutOfRange,         // indices or coordinates outside their domain
  kDegenerateInput,    // zero-extent boxes, zero-area surfaces
  kPrecondition,       // caller broke a documented precondition
  kMalformedSequence,  // token sequence violates its grammar
  kShapeMismatch,      // vector/matrix sizes disagree
  kDivergence,         // training produced a non-finite loss
  kIo,                 // filesystem failures
};

std::string_view to_string(ErrorCode code);

/// Data-level failure raised by every fastmesh operation. Logic errors in the
/// library itself surface as std::logic_error instead.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& message);

}  // namespace fastmesh
