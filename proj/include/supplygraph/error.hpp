#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace supplygraph {

enum class ErrorCode {
  InvalidNodeId,
  KindConflict,
  EndpointKindMismatch,
  DanglingEndpoint,
  SelfLoop,
  UnknownNode,
  UnreadableInput,
  MalformedInput,
  EmptySnapshot,
  EmptyInput,
  InvalidArgument,
  UnassignedNode,
  OutOfOrderSnapshots,
  InconsistentDelta,
  SaltMissing,
  CollisionDetected,
  InvalidConfig,
};

std::string_view error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(error_code_name(code)) + ": " + message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace supplygraph
