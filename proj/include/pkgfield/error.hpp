#pragma once

#include <stdexcept>
#include <string>

namespace pkgfield {

enum class ErrorKind {
    InvalidInput,
    UnsupportedMaterial,
    InvalidDistance,
    NumericalFailure,
    InvalidGrid,
    InvalidPattern,
    Parse,
    Schema,
    EmptyComparison,
    Config,
    Io,
};

/// Every failure raised by the library carries a kind so callers (the CLI in
/// particular) can map it to an exit status without parsing messages.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
    case ErrorKind::InvalidInput: return "invalid input";
    case ErrorKind::UnsupportedMaterial: return "unsupported material";
    case ErrorKind::InvalidDistance: return "invalid distance";
    case ErrorKind::NumericalFailure: return "numerical failure";
    case ErrorKind::InvalidGrid: return "invalid grid";
    case ErrorKind::InvalidPattern: return "invalid pattern";
    case ErrorKind::Parse: return "parse error";
    case ErrorKind::Schema: return "schema error";
    case ErrorKind::EmptyComparison: return "empty comparison";
    case ErrorKind::Config: return "config error";
    case ErrorKind::Io: return "i/o error";
    }
    return "error";
}

} // namespace pkgfield
