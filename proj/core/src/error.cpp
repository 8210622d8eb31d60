#include "truecluster/error.hpp"

namespace truecluster {

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::ZeroRowSum: return "ZeroRowSum";
        case ErrorCode::LengthMismatch: return "LengthMismatch";
        case ErrorCode::KTooLarge: return "KTooLarge";
        case ErrorCode::KTooSmall: return "KTooSmall";
        case ErrorCode::NotAPermutation: return "NotAPermutation";
        case ErrorCode::NotADistribution: return "NotADistribution";
        case ErrorCode::AllRoundsDegenerate: return "AllRoundsDegenerate";
        case ErrorCode::UncoveredCase: return "UncoveredCase";
        case ErrorCode::InsufficientOverlap: return "InsufficientOverlap";
        case ErrorCode::DegenerateCovariance: return "DegenerateCovariance";
        case ErrorCode::ParseError: return "ParseError";
        case ErrorCode::NonFiniteValue: return "NonFiniteValue";
        case ErrorCode::DivisionByZero: return "DivisionByZero";
        case ErrorCode::ConstantColumn: return "ConstantColumn";
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::Io: return "Io";
    }
    return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message, std::optional<std::size_t> index)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), index_(index) {}

}  // namespace truecluster
