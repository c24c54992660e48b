#pragma once

#include <stdexcept>
#include <string>

namespace satsynth {

enum class ErrorCode {
  kInvalidArgument,
  kParse,
  kIo,
  kBehindCamera,
  kNonConvergent,
  kInsufficientCorrespondences,
  kDegenerateConfiguration,
  kNoConsensus,
  kConfig,
  kMissingFrames,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; `code()` identifies the failure class.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace satsynth
