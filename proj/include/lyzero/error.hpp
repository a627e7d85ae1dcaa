#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lyzero {

enum class ErrorCode {
  kInvalidSpec,
  kSizeExceeded,
  kTopologyUnsupported,
  kDegenerateInput,
  kZeroAtUnity,
  kModeMismatch,
  kInvalidState,
  kSubspaceViolation,
  kDomainError,
  kNumerical,
  kConfig,
  kIo,
};

std::string_view to_string(ErrorCode code);

// Single exception type for the library; the code says which contract was
// broken so callers (the CLI in particular) can report it by name.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSpec: return "InvalidSpec";
    case ErrorCode::kSizeExceeded: return "SizeExceeded";
    case ErrorCode::kTopologyUnsupported: return "TopologyUnsupported";
    case ErrorCode::kDegenerateInput: return "DegenerateInput";
    case ErrorCode::kZeroAtUnity: return "ZeroAtUnity";
    case ErrorCode::kModeMismatch: return "ModeMismatch";
    case ErrorCode::kInvalidState: return "InvalidState";
    case ErrorCode::kSubspaceViolation: return "SubspaceViolation";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kNumerical: return "Numerical";
    case ErrorCode::kConfig: return "Config";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace lyzero
