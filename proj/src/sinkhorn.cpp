#include "cdcg/sinkhorn.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>
#include <vector>

#include "cdcg/error.hpp"
#include "cdcg/linalg.hpp"

namespace cdcg {

namespace {

constexpr double kProbFloor = 1e-30;
constexpr double kScaleLow = 1e-150;
constexpr double kScaleHigh = 1e150;

bool scaling_ok(const std::vector<double>& s) {
    return std::all_of(s.begin(), s.end(), [](double v) { return v >= kScaleLow && v <= kScaleHigh; });
}

void check_inputs(const Matrix& q, std::span<const double> pi, const SinkhornOptions& opts) {
    require_shape(q.cols() == pi.size(), "sinkhorn_target: pi length must equal the number of clusters");
    require_shape(q.rows() >= 1 && q.cols() >= 1, "sinkhorn_target: empty assignment matrix");
    if (!(opts.lambda > 0.0)) throw_error(ErrorKind::Config, "lambda must be positive");
    if (!(opts.tol > 0.0) || opts.max_iter == 0) throw_error(ErrorKind::Config, "tol and max_iter must be positive");
    double s = 0.0;
    for (double p : pi) {
        if (!(p > 0.0)) throw_error(ErrorKind::Config, "pi entries must be positive");
        s += p;
    }
    if (std::abs(s - 1.0) > 1e-9) throw_error(ErrorKind::Config, "pi must sum to 1");
}

// Ordinary-domain iteration; nullopt when a scaling leaves the safe range.
std::optional<SinkhornResult> solve_plain(const Matrix& q, std::span<const double> pi, const SinkhornOptions& opts) {
    const std::size_t n = q.rows();
    const std::size_t k = q.cols();
    const double big_n = static_cast<double>(n);

    Matrix kernel(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) kernel(i, j) = std::pow(std::max(q(i, j), kProbFloor), opts.lambda);

    std::vector<double> u(n, 1.0), v(k, 1.0), kv(n), ktu(k);
    SinkhornReport report;
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            kv[i] = linalg::dot(kernel.row(i), v);
            u[i] = 1.0 / kv[i];
        }
        if (!scaling_ok(u)) return std::nullopt;
        std::fill(ktu.begin(), ktu.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) linalg::axpy(u[i], kernel.row(i), ktu);
        for (std::size_t j = 0; j < k; ++j) v[j] = big_n * pi[j] / ktu[j];
        if (!scaling_ok(v)) return std::nullopt;

        // Columns are exact after the v update; rows carry the residual.
        double viol = 0.0;
        for (std::size_t i = 0; i < n; ++i) viol = std::max(viol, std::abs(u[i] * linalg::dot(kernel.row(i), v) - 1.0));
        report.iterations = it;
        report.violation = viol;
        if (viol < opts.tol) break;
    }

    SinkhornResult out{std::move(kernel), report};
    for (std::size_t i = 0; i < n; ++i) {
        auto r = out.plan.row(i);
        for (std::size_t j = 0; j < k; ++j) r[j] *= u[i] * v[j];
    }
    out.report.violation = marginal_violation(out.plan, pi);
    return out;
}

double log_sum_exp(std::span<const double> a) {
    const double top = *std::max_element(a.begin(), a.end());
    if (!std::isfinite(top)) return top;
    double s = 0.0;
    for (double v : a) s += std::exp(v - top);
    return top + std::log(s);
}

SinkhornResult solve_log(const Matrix& q, std::span<const double> pi, const SinkhornOptions& opts) {
    const std::size_t n = q.rows();
    const std::size_t k = q.cols();
    const double log_n = std::log(static_cast<double>(n));

    Matrix log_kernel(n, k);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) log_kernel(i, j) = opts.lambda * std::log(std::max(q(i, j), kProbFloor));

    std::vector<double> f(n, 0.0), g(k, 0.0), row_buf(k), col_buf(n);
    SinkhornReport report;
    report.used_log_domain = true;
    for (std::size_t it = 1; it <= opts.max_iter; ++it) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < k; ++j) row_buf[j] = log_kernel(i, j) + g[j];
            f[i] = -log_sum_exp(row_buf);
        }
        for (std::size_t j = 0; j < k; ++j) {
            for (std::size_t i = 0; i < n; ++i) col_buf[i] = log_kernel(i, j) + f[i];
            g[j] = log_n + std::log(pi[j]) - log_sum_exp(col_buf);
        }
        double viol = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < k; ++j) row_buf[j] = log_kernel(i, j) + g[j];
            viol = std::max(viol, std::abs(std::exp(f[i] + log_sum_exp(row_buf)) - 1.0));
        }
        report.iterations = it;
        report.violation = viol;
        if (viol < opts.tol) break;
    }

    SinkhornResult out{Matrix(n, k), report};
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < k; ++j) out.plan(i, j) = std::exp(f[i] + log_kernel(i, j) + g[j]);
    out.report.violation = marginal_violation(out.plan, pi);
    return out;
}

void require_converged(SinkhornResult& r, const SinkhornOptions& opts) {
    r.report.converged = r.report.violation < opts.tol;
    if (!r.report.converged && opts.throw_on_no_convergence)
        throw NoConvergenceError("NoConvergence: Sinkhorn marginal violation " + std::to_string(r.report.violation) +
                                     " after " + std::to_string(r.report.iterations) + " iterations",
                                 r.report.violation);
}

} // namespace

double marginal_violation(const Matrix& plan, std::span<const double> pi) {
    require_shape(plan.cols() == pi.size(), "marginal_violation: pi length mismatch");
    const double big_n = static_cast<double>(plan.rows());
    double viol = 0.0;
    for (double s : linalg::row_sums(plan)) viol = std::max(viol, std::abs(s - 1.0));
    const auto cols = linalg::column_sums(plan);
    for (std::size_t j = 0; j < cols.size(); ++j) viol = std::max(viol, std::abs(cols[j] - big_n * pi[j]));
    return std::isnan(viol) ? std::numeric_limits<double>::infinity() : viol;
}

SinkhornResult sinkhorn_target(const Matrix& q, std::span<const double> pi, const SinkhornOptions& opts) {
    check_inputs(q, pi, opts);
    if (!opts.force_log_domain) {
        if (auto plain = solve_plain(q, pi, opts)) {
            require_converged(*plain, opts);
            return std::move(*plain);
        }
        if (!opts.allow_log_domain)
            throw_error(ErrorKind::NumericalUnderflow, "Sinkhorn scaling left [1e-150, 1e150]");
    }
    SinkhornResult r = solve_log(q, pi, opts);
    require_converged(r, opts);
    return r;
}

} // namespace cdcg
