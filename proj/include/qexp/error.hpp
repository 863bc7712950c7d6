#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace qexp {

enum class ErrorKind {
    InvalidBase,
    NonFinite,
    OutOfDomain,
    NoSolution,
    DomainMismatch,
    ZeroIntegral,
    BreakpointOverflow,
    NotFound,
    NotStrict,
    BranchOverflow,
    ParseError,
    IoError,
};

constexpr std::string_view to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidBase: return "InvalidBase";
    case ErrorKind::NonFinite: return "NonFinite";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NoSolution: return "NoSolution";
    case ErrorKind::DomainMismatch: return "DomainMismatch";
    case ErrorKind::ZeroIntegral: return "ZeroIntegral";
    case ErrorKind::BreakpointOverflow: return "BreakpointOverflow";
    case ErrorKind::NotFound: return "NotFound";
    case ErrorKind::NotStrict: return "NotStrict";
    case ErrorKind::BranchOverflow: return "BranchOverflow";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::IoError: return "IoError";
    }
    return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above; the
/// message is prefixed with the kind name so it survives a plain `what()`.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& detail)
        : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace qexp
