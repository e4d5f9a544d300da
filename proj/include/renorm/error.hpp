#pragma once

#include <stdexcept>
#include <string>

namespace renorm {

enum class ErrorCode {
  InvalidInput,
  NonConvergence,
  BranchJump,
  NotConverged,
  NoColanding,
  RayNotConverged,
  OutsideLinearizationDomain,
  InsufficientSamples,
  WrongPullback,
  DegreeMismatch,
  CarrotOverlap,
  ContinuityGap,
  GridMismatch,
  SchemaViolation,
};

const char* to_string(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace renorm
