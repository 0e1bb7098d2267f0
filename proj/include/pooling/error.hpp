#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace pooling {

enum class ErrorKind {
    DimensionMismatch,
    InvalidBelief,
    InvalidEvent,
    InvalidAct,
    InvalidWeight,
    InvalidArgument,
    AlphaOutOfRange,
    ZeroProbabilityEvent,
    EventNotConditionable,
    NotProfileFunctional,
    GeometricUndefined,
    WrongExpertCount,
    IndexOutOfRange,
    BracketFailure,
    DisagreementNotRestricted,
    ConditioningUndefined,
    StateSpaceTooSmall,
    WeightDegenerate,
    ParseError,
    ValidationError,
    QueryError,
};

std::string_view to_string(ErrorKind kind) noexcept;

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

}  // namespace pooling
