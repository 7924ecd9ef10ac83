#include "rehearse/error.hpp"

namespace rehearse {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidSchema: return "InvalidSchema";
        case ErrorCode::UnknownField: return "UnknownField";
        case ErrorCode::DuplicateField: return "DuplicateField";
        case ErrorCode::AnswerTooLong: return "AnswerTooLong";
        case ErrorCode::EmptyAnswer: return "EmptyAnswer";
        case ErrorCode::PoolTooSmall: return "PoolTooSmall";
        case ErrorCode::NoGrant: return "NoGrant";
        case ErrorCode::InsufficientPoints: return "InsufficientPoints";
        case ErrorCode::DuplicateGrant: return "DuplicateGrant";
        case ErrorCode::NotStuck: return "NotStuck";
        case ErrorCode::UnknownSession: return "UnknownSession";
        case ErrorCode::UnknownChallenge: return "UnknownChallenge";
        case ErrorCode::EntropyUnattainable: return "EntropyUnattainable";
        case ErrorCode::SessionUnknown: return "SessionUnknown";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::InvalidPolicy: return "InvalidPolicy";
        case ErrorCode::StorageFailure: return "StorageFailure";
        case ErrorCode::UnknownPlayer: return "UnknownPlayer";
        case ErrorCode::CorruptLog: return "CorruptLog";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::PlayerExists: return "PlayerExists";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& detail)
    : std::runtime_error(std::string(to_string(code)) + ": " + detail), code_(code) {}

}  // namespace rehearse
