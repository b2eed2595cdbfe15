#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <string_view>

namespace panicle {

/// Base of every error the library raises.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed syntax in an interchange document. `line` is 1-based; 0 means
/// the position is a byte offset only.
class ParseError : public Error {
public:
    ParseError(const std::string& message, std::size_t line, std::size_t offset = 0);

    std::size_t line() const noexcept { return line_; }
    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t line_;
    std::size_t offset_;
};

/// Well-formed input whose content violates a data invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

enum class ErrorCode {
    InvalidRatio,
    InvalidGeometry,
    UnknownTile,
    OutOfTileBounds,
    ImageMismatch,
    EmptyGroundTruth,
    ZeroGroundTruthCount,
    InsufficientData,
    DegenerateDesign,
    NoCrossing,
    AllZero,
    InvalidSpec,
};

std::string_view to_string(ErrorCode code) noexcept;

/// A valid request the domain cannot satisfy (no crossing, too few points, ...).
class DomainError : public Error {
public:
    DomainError(ErrorCode code, const std::string& message);

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace panicle
