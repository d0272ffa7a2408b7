#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ced {

enum class ErrorCode {
  kOutOfOrderTimestamp,
  kEmptyMemtable,
  kStorageIo,
  kCorruptChunk,
  kUnknownSeries,
  kSyntaxError,
  kUnsupportedFeature,
  kPlanError,
  kIntraChunkOffset,
  kIndexKindMismatch,
  kGuardViolation,
  kUnknownPath,
  kSequenceGap,
  kTransportDown,
  kLinkClosed,
  kHandshakeTimeout,
  kChannelBroken,
  kInvalidConfig,
  kProtocolViolation,
  kDecodeError,
};

std::string_view error_code_name(ErrorCode code);

/// Single exception type for the engine; callers branch on code().
class CedError : public std::runtime_error {
 public:
  CedError(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// Thrown by the query parser; carries the byte offset of the offending token.
class SyntaxError : public CedError {
 public:
  SyntaxError(std::size_t position, const std::string& what)
      : CedError(ErrorCode::kSyntaxError, what + " at offset " + std::to_string(position)),
        position_(position) {}

  std::size_t position() const noexcept { return position_; }

 private:
  std::size_t position_;
};

}  // namespace ced
