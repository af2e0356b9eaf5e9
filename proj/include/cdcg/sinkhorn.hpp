#pragma once

// Balanced target distribution via entropic optimal transport.
//
// The plan is diag(u) Q^lambda diag(v) (elementwise power) with rows summing
// to 1 and columns to N * pi. Starting from v = 1 the scalings alternate
//   u <- 1 ./ (Q^lambda v)
//   v <- N pi ./ ((Q^lambda)^T u)
// until the worst marginal violation drops below tol. If a scaling entry
// leaves [1e-150, 1e150] the solve restarts in the log domain.

#include <cstddef>
#include <span>

#include "cdcg/matrix.hpp"

namespace cdcg {

struct SinkhornOptions {
    double lambda = 5.0;
    double tol = 1e-6;
    std::size_t max_iter = 1000;
    /// Disable to surface NumericalUnderflow instead of retrying in log space.
    bool allow_log_domain = true;
    /// Solve in the log domain from the start.
    bool force_log_domain = false;
    /// When false, a solve that misses tol returns its last iterate with
    /// report.converged = false instead of throwing.
    bool throw_on_no_convergence = true;
};

struct SinkhornReport {
    std::size_t iterations = 0;
    double violation = 0.0;  // max over |row sum - 1| and |col sum - N pi_j|
    bool used_log_domain = false;
    bool converged = false;
};

struct SinkhornResult {
    Matrix plan;
    SinkhornReport report;
};

/// Throws NoConvergenceError when tol is not reached within max_iter (unless
/// throw_on_no_convergence is off), and
/// NumericalUnderflow when scalings degenerate and the log-domain retry is
/// disabled.
SinkhornResult sinkhorn_target(const Matrix& q, std::span<const double> pi, const SinkhornOptions& opts = {});

/// Worst absolute marginal violation of `plan` against rows = 1, cols = N pi.
double marginal_violation(const Matrix& plan, std::span<const double> pi);

} // namespace cdcg
