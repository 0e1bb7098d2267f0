#include "pooling/error.hpp"

namespace pooling {

std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
        case ErrorKind::DimensionMismatch: return "DimensionMismatch";
        case ErrorKind::InvalidBelief: return "InvalidBelief";
        case ErrorKind::InvalidEvent: return "InvalidEvent";
        case ErrorKind::InvalidAct: return "InvalidAct";
        case ErrorKind::InvalidWeight: return "InvalidWeight";
        case ErrorKind::InvalidArgument: return "InvalidArgument";
        case ErrorKind::AlphaOutOfRange: return "AlphaOutOfRange";
        case ErrorKind::ZeroProbabilityEvent: return "ZeroProbabilityEvent";
        case ErrorKind::EventNotConditionable: return "EventNotConditionable";
        case ErrorKind::NotProfileFunctional: return "NotProfileFunctional";
        case ErrorKind::GeometricUndefined: return "GeometricUndefined";
        case ErrorKind::WrongExpertCount: return "WrongExpertCount";
        case ErrorKind::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorKind::BracketFailure: return "BracketFailure";
        case ErrorKind::DisagreementNotRestricted: return "DisagreementNotRestricted";
        case ErrorKind::ConditioningUndefined: return "ConditioningUndefined";
        case ErrorKind::StateSpaceTooSmall: return "StateSpaceTooSmall";
        case ErrorKind::WeightDegenerate: return "WeightDegenerate";
        case ErrorKind::ParseError: return "ParseError";
        case ErrorKind::ValidationError: return "ValidationError";
        case ErrorKind::QueryError: return "QueryError";
    }
    return "Unknown";
}

}  // namespace pooling
