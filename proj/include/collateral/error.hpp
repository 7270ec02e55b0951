#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace collateral {

enum class ErrorCode {
    InvalidParams,
    IndexOutOfRange,
    SlotRegression,
    WalletOffline,
    InsufficientCollateral,
    FlushExceedsCommitted,
    ZeroFlush,
    OddWalletCount,
    InvalidEta,
    BudgetExceeded,
    NotSingleWallet,
    EpsilonDoesNotDivideC,
    InvalidSpec,
    DomainError,
    ConfigError,
};

constexpr std::string_view to_string(ErrorCode code) {
    switch (code) {
        case ErrorCode::InvalidParams: return "InvalidParams";
        case ErrorCode::IndexOutOfRange: return "IndexOutOfRange";
        case ErrorCode::SlotRegression: return "SlotRegression";
        case ErrorCode::WalletOffline: return "WalletOffline";
        case ErrorCode::InsufficientCollateral: return "InsufficientCollateral";
        case ErrorCode::FlushExceedsCommitted: return "FlushExceedsCommitted";
        case ErrorCode::ZeroFlush: return "ZeroFlush";
        case ErrorCode::OddWalletCount: return "OddWalletCount";
        case ErrorCode::InvalidEta: return "InvalidEta";
        case ErrorCode::BudgetExceeded: return "BudgetExceeded";
        case ErrorCode::NotSingleWallet: return "NotSingleWallet";
        case ErrorCode::EpsilonDoesNotDivideC: return "EpsilonDoesNotDivideC";
        case ErrorCode::InvalidSpec: return "InvalidSpec";
        case ErrorCode::DomainError: return "DomainError";
        case ErrorCode::ConfigError: return "ConfigError";
    }
    return "Unknown";
}

// Every failure in the library surfaces as this exception; callers branch on code().
class Error : public std::runtime_error {
public:
    Error(ErrorCode code, const std::string& what)
        : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

    ErrorCode code() const noexcept { return code_; }

private:
    ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) {
    throw Error(code, what);
}

inline void require(bool cond, ErrorCode code, const std::string& what) {
    if (!cond) fail(code, what);
}

}  // namespace collateral
