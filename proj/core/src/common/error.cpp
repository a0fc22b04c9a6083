#include "copyguard/common/error.hpp"

namespace copyguard {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::MalformedRow: return "MalformedRow";
        case ErrorCode::DuplicateCreate: return "DuplicateCreate";
        case ErrorCode::DuplicateOrderingKey: return "DuplicateOrderingKey";
        case ErrorCode::MissingCreate: return "MissingCreate";
        case ErrorCode::CreatorUnknown: return "CreatorUnknown";
        case ErrorCode::InfeasibleTrade: return "InfeasibleTrade";
        case ErrorCode::InfeasibleForCopier: return "InfeasibleForCopier";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::InvalidSequence: return "InvalidSequence";
        case ErrorCode::EmptyLedger: return "EmptyLedger";
        case ErrorCode::InfeasibleSpec: return "InfeasibleSpec";
        case ErrorCode::DegenerateTrainingSet: return "DegenerateTrainingSet";
        case ErrorCode::SingleClassValidation: return "SingleClassValidation";
        case ErrorCode::NoSelections: return "NoSelections";
        case ErrorCode::ClassifierUnavailable: return "ClassifierUnavailable";
        case ErrorCode::TransportError: return "TransportError";
        case ErrorCode::MalformedReply: return "MalformedReply";
        case ErrorCode::LogprobsUnavailable: return "LogprobsUnavailable";
        case ErrorCode::InvalidConfig: return "InvalidConfig";
        case ErrorCode::MissingInput: return "MissingInput";
        case ErrorCode::Io: return "Io";
        case ErrorCode::InvariantViolation: return "InvariantViolation";
    }
    return "Unknown";
}

ErrorCategory category(ErrorCode code) {
    switch (code) {
        case ErrorCode::TransportError:
        case ErrorCode::MalformedReply:
        case ErrorCode::LogprobsUnavailable:
        case ErrorCode::ClassifierUnavailable:
            return ErrorCategory::External;
        case ErrorCode::InvariantViolation:
            return ErrorCategory::Internal;
        default:
            return ErrorCategory::Input;
    }
}

}  // namespace copyguard
