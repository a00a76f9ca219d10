#pragma once

#include <stdexcept>
#include <string>

namespace fairscore {

enum class ErrorCode {
    EmptyInput,
    ScoreOutOfRange,
    NonPositiveWeight,
    WeightSumInvalid,
    DegenerateSupport,
    MuOutOfRange,
    POutOfRange,
    InfeasiblePair,
    IndexOutOfRange,
    EmptyIntersection,
    DegeneratePair,
    InvalidLoss,
    InvalidWeights,
    UnknownScore,
    GridTooLarge,
    VerificationFailure,
    EmptyBinInCalibrationSplit,
    InsufficientData,
    BadInput,
};

inline const char* to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::EmptyInput: return "EmptyInput";
        case ErrorCode::ScoreOutOfRange: return "ScoreOutOfRange";
        case ErrorCode::NonPositiveWeight: return "NonPositiveWeight";
        case ErrorCode::WeightSumInvalid: return "WeightSumInvalid";
        case ErrorCode::DegenerateSupport: return "DegenerateSupport";
        case ErrorCode::MuOutOfRange: return "MuOutOfRange";
        case ErrorCode::POutOfRange: return "POutOfRange";
        case ErrorCode::InfeasiblePair: return "InfeasiblePair";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::EmptyIntersection: return "EmptyIntersection";
        case ErrorCode::DegeneratePair: return "DegeneratePair";
        case ErrorCode::InvalidLoss: return "InvalidLoss";
        case ErrorCode::InvalidWeights: return "InvalidWeights";
        case ErrorCode::UnknownScore: return "UnknownScore";
        case ErrorCode::GridTooLarge: return "GridTooLarge";
        case ErrorCode::VerificationFailure: return "VerificationFailure";
        case ErrorCode::EmptyBinInCalibrationSplit: return "EmptyBinInCalibrationSplit";
        case ErrorCode::InsufficientData: return "InsufficientData";
        case ErrorCode::BadInput: return "BadInput";
    }
    return "Unknown";
}

/// Library-wide exception type. Every throwing operation reports one of the
/// ErrorCode values above plus a human-readable message.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

}  // namespace fairscore
