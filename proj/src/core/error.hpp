#pragma once

#include <stdexcept>
#include <string>

namespace sectionscope {

/// Failure categories shared by the C++ core and the C boundary. The numeric
/// values are part of the C ABI (see sectionscope.h) and must not change.
enum class ErrorCode : int {
  kOk = 0,
  kInvalidArgument = 1,
  kCollision = 2,
  kBinding = 3,
  kNoCrossing = 4,
  kMaxTime = 5,
  kStepUnderflow = 6,
  kNoConvergence = 7,
  kJacobianSingular = 8,
  kFoldDetected = 9,
  kAssumptionViolation = 10,
  kConstraintDrift = 11,
  kPerturbationEscape = 12,
  kBracketFailure = 13,
  kOffSurface = 14,
  kIo = 15,
  kInternal = 16,
};

const char* error_code_name(ErrorCode code) noexcept;

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what) : std::runtime_error(what), code_(code) {}
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace sectionscope
