#include "objedit/error.hpp"

namespace objedit {

const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::SingularTransform: return "SingularTransform";
        case ErrorCode::DimensionMismatch: return "DimensionMismatch";
        case ErrorCode::EmptyMask: return "EmptyMask";
        case ErrorCode::DegenerateScale: return "DegenerateScale";
        case ErrorCode::ZeroSizeObject: return "ZeroSizeObject";
        case ErrorCode::UnparsableInstruction: return "UnparsableInstruction";
        case ErrorCode::EmptyInstruction: return "EmptyInstruction";
        case ErrorCode::MalformedReply: return "MalformedReply";
        case ErrorCode::MissingDescriptions: return "MissingDescriptions";
        case ErrorCode::NoCandidateObjects: return "NoCandidateObjects";
        case ErrorCode::MissingMatrixTokens: return "MissingMatrixTokens";
        case ErrorCode::MissingIdTokens: return "MissingIdTokens";
        case ErrorCode::WrongNumberCount: return "WrongNumberCount";
        case ErrorCode::BadBottomRow: return "BadBottomRow";
        case ErrorCode::BadId: return "BadId";
        case ErrorCode::BackendUnreachable: return "BackendUnreachable";
        case ErrorCode::ObjectNotFound: return "ObjectNotFound";
        case ErrorCode::MalformedAnnotation: return "MalformedAnnotation";
        case ErrorCode::MissingMask: return "MissingMask";
        case ErrorCode::ExhaustedResampling: return "ExhaustedResampling";
        case ErrorCode::UnknownSampleId: return "UnknownSampleId";
        case ErrorCode::BadMaskValue: return "BadMaskValue";
        case ErrorCode::IoError: return "IoError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "UnknownError";
}

}  // namespace objedit
