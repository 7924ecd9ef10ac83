#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rehearse {

enum class ErrorCode {
    InvalidSchema,
    UnknownField,
    DuplicateField,
    AnswerTooLong,
    EmptyAnswer,
    PoolTooSmall,
    NoGrant,
    InsufficientPoints,
    DuplicateGrant,
    NotStuck,
    UnknownSession,
    UnknownChallenge,
    EntropyUnattainable,
    SessionUnknown,
    InvalidConfig,
    InvalidPolicy,
    StorageFailure,
    UnknownPlayer,
    CorruptLog,
    ParseError,
    PlayerExists,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& detail);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace rehearse
