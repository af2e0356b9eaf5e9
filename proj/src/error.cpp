#include "cdcg/error.hpp"

namespace cdcg {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Config: return "ConfigError";
    case ErrorKind::Io: return "IoError";
    case ErrorKind::Parse: return "ParseError";
    case ErrorKind::Validation: return "ValidationError";
    case ErrorKind::DegenerateInput: return "DegenerateInput";
    case ErrorKind::DegenerateGraph: return "DegenerateGraph";
    case ErrorKind::EmptyVolume: return "EmptyVolume";
    case ErrorKind::ShapeMismatch: return "ShapeMismatch";
    case ErrorKind::NotStochastic: return "NotStochastic";
    case ErrorKind::LengthMismatch: return "LengthMismatch";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NumericalUnderflow: return "NumericalUnderflow";
    }
    return "Error";
}

int exit_code_for(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::Config:
        return 2;
    case ErrorKind::Io:
    case ErrorKind::Parse:
    case ErrorKind::Validation:
    case ErrorKind::DegenerateInput:
    case ErrorKind::DegenerateGraph:
    case ErrorKind::LengthMismatch:
        return 3;
    default:
        return 4;
    }
}

void throw_error(ErrorKind kind, const std::string& what) {
    throw Error(kind, std::string(to_string(kind)) + ": " + what);
}

} // namespace cdcg
