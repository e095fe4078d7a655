#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace graphon_cheeger {

enum class ErrorCode {
    NonSquare,
    ValueOutOfRange,
    Asymmetric,
    ZeroDegreeCell,
    Disconnected,
    DimensionMismatch,
    EmptySet,
    ZeroVolume,
    ZeroFunction,
    NonFinite,
    KTooLarge,
    NonUnitVector,
    IndexOutOfRange,
    MassShortfall,
    InsufficientSets,
    SeparationViolation,
    MassViolation,
    CertificateViolation,
    OverlappingSets,
    TooLarge,
    ParseError,
    BlockMisalignment,
    InvalidArgument,
};

inline std::string_view to_string(ErrorCode code) noexcept {
    switch (code) {
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::ValueOutOfRange: return "ValueOutOfRange";
    case ErrorCode::Asymmetric: return "Asymmetric";
    case ErrorCode::ZeroDegreeCell: return "ZeroDegreeCell";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::EmptySet: return "EmptySet";
    case ErrorCode::ZeroVolume: return "ZeroVolume";
    case ErrorCode::ZeroFunction: return "ZeroFunction";
    case ErrorCode::NonFinite: return "NonFinite";
    case ErrorCode::KTooLarge: return "KTooLarge";
    case ErrorCode::NonUnitVector: return "NonUnitVector";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::MassShortfall: return "MassShortfall";
    case ErrorCode::InsufficientSets: return "InsufficientSets";
    case ErrorCode::SeparationViolation: return "SeparationViolation";
    case ErrorCode::MassViolation: return "MassViolation";
    case ErrorCode::CertificateViolation: return "CertificateViolation";
    case ErrorCode::OverlappingSets: return "OverlappingSets";
    case ErrorCode::TooLarge: return "TooLarge";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::BlockMisalignment: return "BlockMisalignment";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    }
    return "Unknown";
}

/// Domain error raised by every operation in the library. The code is stable
/// and machine-readable; the message carries human context (indices, values).
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace graphon_cheeger
