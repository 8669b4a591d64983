#pragma once

#include <stdexcept>
#include <string>

namespace objedit {

// Every recoverable failure in the toolkit is reported as an Error with a
// machine-checkable code, so callers (retry loops, the pipeline runner, the
// CLI) can branch on what failed without string matching.
enum class ErrorCode {
    // geometry
    SingularTransform,
    DimensionMismatch,
    EmptyMask,
    // editops
    DegenerateScale,
    ZeroSizeObject,
    UnparsableInstruction,
    // llmproto
    EmptyInstruction,
    MalformedReply,
    MissingDescriptions,
    NoCandidateObjects,
    MissingMatrixTokens,
    MissingIdTokens,
    WrongNumberCount,
    BadBottomRow,
    BadId,
    // backends
    BackendUnreachable,
    ObjectNotFound,
    // dataset
    MalformedAnnotation,
    MissingMask,
    ExhaustedResampling,
    // evalreport
    UnknownSampleId,
    // i/o and configuration
    BadMaskValue,
    IoError,
    ConfigError,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

  private:
    ErrorCode code_;
};

}  // namespace objedit
