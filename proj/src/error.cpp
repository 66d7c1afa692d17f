#include "topoflock/error.hpp"

namespace topoflock {

std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::AsymmetricWeights: return "AsymmetricWeights";
    case ErrorCode::NegativeWeight: return "NegativeWeight";
    case ErrorCode::NonzeroDiagonal: return "NonzeroDiagonal";
    case ErrorCode::TooFewAgents: return "TooFewAgents";
    case ErrorCode::Disconnected: return "Disconnected";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::RatioNotRational: return "RatioNotRational";
    case ErrorCode::MissingRatioCertificate: return "MissingRatioCertificate";
    case ErrorCode::ArithmeticOverflow: return "ArithmeticOverflow";
    case ErrorCode::ConditionAViolated: return "ConditionAViolated";
    case ErrorCode::ConditionBViolated: return "ConditionBViolated";
    case ErrorCode::SizeMismatch: return "SizeMismatch";
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NonzeroMeanInput: return "NonzeroMeanInput";
    case ErrorCode::NonpositiveStep: return "NonpositiveStep";
    case ErrorCode::UnorderedSwitchTimes: return "UnorderedSwitchTimes";
    case ErrorCode::UnknownMode: return "UnknownMode";
    case ErrorCode::DecayWindowViolated: return "DecayWindowViolated";
    case ErrorCode::DwellBoundViolated: return "DwellBoundViolated";
    case ErrorCode::AlphaBelowXi: return "AlphaBelowXi";
    case ErrorCode::InvalidParams: return "InvalidParams";
    case ErrorCode::NoFeasibleParams: return "NoFeasibleParams";
    case ErrorCode::CertificateFailed: return "CertificateFailed";
    case ErrorCode::PropertyViolated: return "PropertyViolated";
    case ErrorCode::RepeatedConsecutiveMode: return "RepeatedConsecutiveMode";
    case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::DegenerateSpectrum: return "DegenerateSpectrum";
    case ErrorCode::NonOddExponents: return "NonOddExponents";
    case ErrorCode::NoDistinctEigTopology: return "NoDistinctEigTopology";
    case ErrorCode::ParseError: return "ParseError";
    case ErrorCode::ValidationError: return "ValidationError";
    }
    return "Unknown";
}

} // namespace topoflock
