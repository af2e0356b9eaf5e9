#pragma once

#include <stdexcept>
#include <string>

namespace cdcg {

enum class ErrorKind {
    Config,
    Io,
    Parse,
    Validation,
    DegenerateInput,
    DegenerateGraph,
    EmptyVolume,
    ShapeMismatch,
    NotStochastic,
    LengthMismatch,
    NoConvergence,
    NumericalUnderflow,
};

const char* to_string(ErrorKind kind) noexcept;

/// Base error for the library. The kind selects the CLI exit code.
class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

/// Sinkhorn failed to reach the marginal tolerance, even after the
/// log-domain retry. Carries the best violation achieved.
class NoConvergenceError : public Error {
public:
    NoConvergenceError(const std::string& what, double violation)
        : Error(ErrorKind::NoConvergence, what), violation_(violation) {}

    double violation() const noexcept { return violation_; }

private:
    double violation_;
};

/// 0 success, 2 config error, 3 data error, 4 numerical failure.
int exit_code_for(ErrorKind kind) noexcept;

[[noreturn]] void throw_error(ErrorKind kind, const std::string& what);

inline void require_shape(bool ok, const std::string& what) {
    if (!ok) throw_error(ErrorKind::ShapeMismatch, what);
}

} // namespace cdcg
