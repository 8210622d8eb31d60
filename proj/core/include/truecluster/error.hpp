#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>

namespace truecluster {

enum class ErrorCode {
    ZeroRowSum,
    LengthMismatch,
    KTooLarge,
    KTooSmall,
    NotAPermutation,
    NotADistribution,
    AllRoundsDegenerate,
    UncoveredCase,
    InsufficientOverlap,
    DegenerateCovariance,
    ParseError,
    NonFiniteValue,
    DivisionByZero,
    ConstantColumn,
    InvalidArgument,
    Io,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Library error. `index()` carries the offending case/row/column (0-based)
/// when the failure is attributable to one.
class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& message, std::optional<std::size_t> index = std::nullopt);

    ErrorCode code() const noexcept { return code_; }
    std::optional<std::size_t> index() const noexcept { return index_; }

  private:
    ErrorCode code_;
    std::optional<std::size_t> index_;
};

}  // namespace truecluster
