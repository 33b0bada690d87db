#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace leaflab {

enum class ErrorCode {
    InvalidArgument,
    InvalidMap,
    RootFindingFailure,
    BranchOutOfRange,
    MapMismatch,
    PathThroughCriticalValue,
    TrackingDivergence,
    UnsupportedChart,
    PreconditionEvidenceFailure,
    BudgetExceeded,
    CombinatorialBudgetExceeded,
    NotRepelling,
    NotSuperattracting,
    NotParabolic,
    NotInPetal,
    ConvergenceBudgetExceeded,
    LeafMismatch,
    BranchTrackingFailure,
    ZeroDerivative,
    EmptyAfterClip,
    DegenerateInput,
    UnsupportedComplement,
    NotInjectiveOnCircle,
    NotAPolynomial,
    ConfigError,
    IoError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library. The code is stable and is what
/// reports and the CLI expose; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& message)
        : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

}  // namespace leaflab
