#pragma once

#include <stdexcept>
#include <string>

namespace lagrg {

enum class ErrorCode {
    InvalidArgument = 1,
    ZeroConstantTerm,
    DivergentSum,
    QuadratureNonconvergent,
    SingularTime,
    NotNormalized,
    DegenerateInput,
    TruncationFailure,
    DomainExit,
    SingularOrbit,
    NoBracket,
    Undecided,
    CorridorViolation,
    MassLeak,
    ConfigInvalid,
    IoError,
};

inline const char* error_code_name(ErrorCode c) {
    switch (c) {
        case ErrorCode::InvalidArgument: return "InvalidArgument";
        case ErrorCode::ZeroConstantTerm: return "ZeroConstantTerm";
        case ErrorCode::DivergentSum: return "DivergentSum";
        case ErrorCode::QuadratureNonconvergent: return "QuadratureNonconvergent";
        case ErrorCode::SingularTime: return "SingularTime";
        case ErrorCode::NotNormalized: return "NotNormalized";
        case ErrorCode::DegenerateInput: return "DegenerateInput";
        case ErrorCode::TruncationFailure: return "TruncationFailure";
        case ErrorCode::DomainExit: return "DomainExit";
        case ErrorCode::SingularOrbit: return "SingularOrbit";
        case ErrorCode::NoBracket: return "NoBracket";
        case ErrorCode::Undecided: return "Undecided";
        case ErrorCode::CorridorViolation: return "CorridorViolation";
        case ErrorCode::MassLeak: return "MassLeak";
        case ErrorCode::ConfigInvalid: return "ConfigInvalid";
        case ErrorCode::IoError: return "IoError";
    }
    return "Unknown";
}

class Error : public std::runtime_error {
  public:
    Error(ErrorCode code, const std::string& where, const std::string& what)
        : std::runtime_error(std::string(error_code_name(code)) + " [" + where + "]: " + what),
          code_(code), where_(where) {}

    ErrorCode code() const { return code_; }
    const std::string& where() const { return where_; }

  private:
    ErrorCode code_;
    std::string where_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& where, const std::string& what) {
    throw Error(code, where, what);
}

}  // namespace lagrg
