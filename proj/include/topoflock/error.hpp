#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace topoflock {

enum class ErrorCode {
    AsymmetricWeights,
    NegativeWeight,
    NonzeroDiagonal,
    TooFewAgents,
    Disconnected,
    ConvergenceFailure,
    RatioNotRational,
    MissingRatioCertificate,
    ArithmeticOverflow,
    ConditionAViolated,
    ConditionBViolated,
    SizeMismatch,
    DimensionMismatch,
    NonzeroMeanInput,
    NonpositiveStep,
    UnorderedSwitchTimes,
    UnknownMode,
    DecayWindowViolated,
    DwellBoundViolated,
    AlphaBelowXi,
    InvalidParams,
    NoFeasibleParams,
    CertificateFailed,
    PropertyViolated,
    RepeatedConsecutiveMode,
    IndexOutOfRange,
    DegenerateSpectrum,
    NonOddExponents,
    NoDistinctEigTopology,
    ParseError,
    ValidationError,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace topoflock
