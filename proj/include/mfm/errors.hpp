#pragma once

#include <stdexcept>
#include <string>

namespace mfm {

enum class ErrorKind {
    InvalidInput,
    NegativeForward,
    Domain,
    UnsupportedInput,
    NotBracketed,
    NumericFailure,
    InsufficientData,
    Divergence,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& message)
        : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

inline void require(bool condition, ErrorKind kind, const std::string& message) {
    if (!condition) throw Error(kind, message);
}

inline const char* to_string(ErrorKind kind) {
    switch (kind) {
        case ErrorKind::InvalidInput: return "invalid input";
        case ErrorKind::NegativeForward: return "negative forward";
        case ErrorKind::Domain: return "domain error";
        case ErrorKind::UnsupportedInput: return "unsupported input";
        case ErrorKind::NotBracketed: return "not bracketed";
        case ErrorKind::NumericFailure: return "numeric failure";
        case ErrorKind::InsufficientData: return "insufficient data";
        case ErrorKind::Divergence: return "divergence";
    }
    return "error";
}

}  // namespace mfm
