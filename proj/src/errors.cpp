#include "leaflab/errors.hpp"

#include <cstdio>

#include "leaflab/types.hpp"

namespace leaflab {

std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::InvalidMap: return "InvalidMap";
        case ErrorCode::RootFindingFailure: return "RootFindingFailure";
        case ErrorCode::BranchOutOfRange: return "BranchOutOfRange";
        case ErrorCode::MapMismatch: return "MapMismatch";
        case ErrorCode::PathThroughCriticalValue: return "PathThroughCriticalValue";
        case ErrorCode::TrackingDivergence: return "TrackingDivergence";
        case ErrorCode::UnsupportedChart: return "UnsupportedChart";
        case ErrorCode::PreconditionEvidenceFailure: return "PreconditionEvidenceFailure";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::CombinatorialBudgetExceeded: return "CombinatorialBudgetExceeded";
        case ErrorCode::NotRepelling: return "NotRepelling";
        case ErrorCode::NotSuperattracting: return "NotSuperattracting";
        case ErrorCode::NotParabolic: return "NotParabolic";
        case ErrorCode::NotInPetal: return "NotInPetal";
        case ErrorCode::ConvergenceBudgetExceeded: return "ConvergenceBudgetExceeded";
        case ErrorCode::LeafMismatch: return "LeafMismatch";
        case ErrorCode::BranchTrackingFailure: return "BranchTrackingFailure";
        case ErrorCode::ZeroDerivative: return "ZeroDerivative";
        case ErrorCode::EmptyAfterClip: return "EmptyAfterClip";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::UnsupportedComplement: return "UnsupportedComplement";
        case ErrorCode::NotInjectiveOnCircle: return "NotInjectiveOnCircle";
        case ErrorCode::NotAPolynomial: return "NotAPolynomial";
        case ErrorCode::ConfigError: return "ConfigError";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

std::string to_string(Complex z) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g%+.17gi", z.real(), z.imag());
    return buf;
}

std::string to_string(const SpherePoint& p) { return p.is_infinite() ? std::string("inf") : to_string(p.value()); }

}  // namespace leaflab
