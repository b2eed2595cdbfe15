#include "panicle/errors.hpp"

namespace panicle {

namespace {

std::string locate(const std::string& message, std::size_t line, std::size_t offset) {
    if (line > 0) return "line " + std::to_string(line) + ": " + message;
    if (offset > 0) return "offset " + std::to_string(offset) + ": " + message;
    return message;
}

}  // namespace

ParseError::ParseError(const std::string& message, std::size_t line, std::size_t offset)
    : Error(locate(message, line, offset)), line_(line), offset_(offset) {}

std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
        case ErrorCode::InvalidRatio: return "InvalidRatio";
        case ErrorCode::InvalidGeometry: return "InvalidGeometry";
        case ErrorCode::UnknownTile: return "UnknownTile";
        case ErrorCode::OutOfTileBounds: return "OutOfTileBounds";
        case ErrorCode::ImageMismatch: return "ImageMismatch";
        case ErrorCode::EmptyGroundTruth: return "EmptyGroundTruth";
        case ErrorCode::ZeroGroundTruthCount: return "ZeroGroundTruthCount";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::DegenerateDesign: return "DegenerateDesign";
        case ErrorCode::NoCrossing: return "NoCrossing";
        case ErrorCode::AllZero: return "AllZero";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
    }
    return "Unknown";
}

DomainError::DomainError(ErrorCode code, const std::string& message)
    : Error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace panicle
