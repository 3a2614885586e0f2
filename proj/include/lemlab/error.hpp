#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace lemlab {

enum class ErrorCode {
    BadParameter,
    PoleAtZ,
    OriginInput,
    NoConvergence,
    BudgetExceeded,
    TransversalityFailure,
    StalledTrace,
    HomotopyStall,
    BadSector,
    ConfigError,
};

inline std::string_view to_string(ErrorCode code)
{
    switch (code) {
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::PoleAtZ: return "PoleAtZ";
    case ErrorCode::OriginInput: return "OriginInput";
    case ErrorCode::NoConvergence: return "NoConvergence";
    case ErrorCode::BudgetExceeded: return "BudgetExceeded";
    case ErrorCode::TransversalityFailure: return "TransversalityFailure";
    case ErrorCode::StalledTrace: return "StalledTrace";
    case ErrorCode::HomotopyStall: return "HomotopyStall";
    case ErrorCode::BadSector: return "BadSector";
    case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code)
    {
    }

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

} // namespace lemlab
