#pragma once

#include <stdexcept>
#include <string>

namespace openbo {

enum class ErrorCode {
    NearDegenerate,
    ConvergenceFailure,
    SingularPairing,
    StepOverflow,
    DimensionMismatch,
    UnsupportedDissipator,
    TrackingAmbiguity,
    DiagonalRequest,
    SmallDenominator,
    InvalidRates,
    DegenerateEigenvalue,
    NoZeroMode,
    InvalidArgument,
    InvalidConfig,
};

const char* to_string(ErrorCode code) noexcept;

// Config errors map to CLI exit code 2, everything else to 3.
constexpr bool is_config_error(ErrorCode code) noexcept
{
    return code == ErrorCode::InvalidConfig;
}

class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace openbo
