#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace copyguard {

enum class ErrorCode {
    MalformedRow,
    DuplicateCreate,
    DuplicateOrderingKey,
    MissingCreate,
    CreatorUnknown,
    InfeasibleTrade,
    InfeasibleForCopier,
    DomainError,
    InvalidSequence,
    EmptyLedger,
    InfeasibleSpec,
    DegenerateTrainingSet,
    SingleClassValidation,
    NoSelections,
    ClassifierUnavailable,
    TransportError,
    MalformedReply,
    LogprobsUnavailable,
    InvalidConfig,
    MissingInput,
    Io,
    InvariantViolation,
};

// Coarse grouping used by the CLI to pick an exit status.
enum class ErrorCategory { Input, External, Internal };

std::string_view to_string(ErrorCode code);
ErrorCategory category(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace copyguard
