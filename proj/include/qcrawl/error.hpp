#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qcrawl {

enum class ErrorCode {
    Io,
    Parse,
    DuplicateDoc,
    UnknownDoc,
    EmptyText,
    MissingScore,
    NonFiniteScore,
    NoOutlinks,
    EmptySeeds,
    OutOfRange,
    InvalidArgument,
    ZeroWidth,
    EdgeMismatch,
    EmptyHistogram,
    UndefinedCorrelation,
    DegenerateBounds,
    LengthMismatch,
    CheckpointMismatch,
    DuplicateField,
};

constexpr std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::Io: return "Io";
    case ErrorCode::Parse: return "Parse";
    case ErrorCode::DuplicateDoc: return "DuplicateDoc";
    case ErrorCode::UnknownDoc: return "UnknownDoc";
    case ErrorCode::EmptyText: return "EmptyText";
    case ErrorCode::MissingScore: return "MissingScore";
    case ErrorCode::NonFiniteScore: return "NonFiniteScore";
    case ErrorCode::NoOutlinks: return "NoOutlinks";
    case ErrorCode::EmptySeeds: return "EmptySeeds";
    case ErrorCode::OutOfRange: return "OutOfRange";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::ZeroWidth: return "ZeroWidth";
    case ErrorCode::EdgeMismatch: return "EdgeMismatch";
    case ErrorCode::EmptyHistogram: return "EmptyHistogram";
    case ErrorCode::UndefinedCorrelation: return "UndefinedCorrelation";
    case ErrorCode::DegenerateBounds: return "DegenerateBounds";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::CheckpointMismatch: return "CheckpointMismatch";
    case ErrorCode::DuplicateField: return "DuplicateField";
    }
    return "Unknown";
}

/// Every failure raised by the library. The message is prefixed with the code name.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace qcrawl
