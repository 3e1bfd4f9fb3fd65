#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace quip {

enum class ErrorCode {
    session_not_found,
    rejected_empty,
    invalid_mode,
    wrong_mode,
    unknown_utterance,
    unknown_keyword,
    unknown_association,
    unknown_suggestion,
    state_violation,
    joke_mode_off,
    precondition,
    stale_suggestion,
    no_new_suggestions,
    provider_failure,
    provider_timeout,
    malformed_response,
    stream_closed,
    tts_failure,
    invalid_config,
    schema_violation,
    corrupt_log,
    io_failure,
};

std::string_view to_string(ErrorCode code);

// Every failure crossing a module boundary is a quip::Error carrying a code
// that maps 1:1 onto the wire-level error names.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

// corrupt_log additionally reports where the log stopped being trustworthy.
class CorruptLogError : public Error {
public:
    CorruptLogError(std::size_t offset, const std::string& message)
        : Error(ErrorCode::corrupt_log, message), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

}  // namespace quip
