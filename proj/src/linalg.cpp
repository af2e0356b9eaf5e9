#include "cdcg/linalg.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include "cdcg/error.hpp"
#include "cdcg/simd/kernels.hpp"

namespace cdcg::linalg {

namespace {

std::atomic<unsigned> g_threads{1};

// Below this many output rows the thread start-up cost dominates.
constexpr std::size_t kMinRowsPerThread = 64;

} // namespace

void set_num_threads(unsigned n) noexcept { g_threads.store(std::max(1u, n)); }

unsigned num_threads() noexcept { return g_threads.load(); }

void parallel_rows(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn) {
    const std::size_t workers =
        std::min<std::size_t>(num_threads(), std::max<std::size_t>(1, n / kMinRowsPerThread));
    if (workers <= 1) {
        fn(0, n);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    const std::size_t chunk = (n + workers - 1) / workers;
    for (std::size_t w = 1; w < workers; ++w) {
        const std::size_t b = w * chunk;
        const std::size_t e = std::min(n, b + chunk);
        if (b < e) pool.emplace_back([&fn, b, e] { fn(b, e); });
    }
    fn(0, std::min(n, chunk));
}

double dot(std::span<const double> a, std::span<const double> b) {
    require_shape(a.size() == b.size(), "dot: length mismatch");
    return simd::active().dot(a.data(), b.data(), a.size());
}

void axpy(double alpha, std::span<const double> x, std::span<double> y) {
    require_shape(x.size() == y.size(), "axpy: length mismatch");
    simd::active().axpy(alpha, x.data(), y.data(), x.size());
}

double squared_distance(std::span<const double> a, std::span<const double> b) {
    require_shape(a.size() == b.size(), "squared_distance: length mismatch");
    return simd::active().squared_distance(a.data(), b.data(), a.size());
}

Matrix matmul_nt(const Matrix& a, const Matrix& b) {
    require_shape(a.cols() == b.cols(), "matmul_nt: inner dimension mismatch");
    Matrix c(a.rows(), b.rows());
    const auto& k = simd::active();
    const std::size_t inner = a.cols();
    parallel_rows(a.rows(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            const double* ai = a.row(i).data();
            double* ci = c.row(i).data();
            for (std::size_t j = 0; j < b.rows(); ++j) ci[j] = k.dot(ai, b.row(j).data(), inner);
        }
    });
    return c;
}

Matrix matmul(const Matrix& a, const Matrix& b) {
    require_shape(a.cols() == b.rows(), "matmul: inner dimension mismatch");
    // Narrow right operands: dot products along the long inner dimension.
    if (b.cols() <= 32 && b.rows() >= b.cols()) return matmul_nt(a, b.transposed());
    Matrix c(a.rows(), b.cols());
    const auto& k = simd::active();
    const std::size_t width = b.cols();
    parallel_rows(a.rows(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i) {
            double* ci = c.row(i).data();
            const auto ai = a.row(i);
            for (std::size_t p = 0; p < ai.size(); ++p) {
                if (ai[p] != 0.0) k.axpy(ai[p], b.row(p).data(), ci, width);
            }
        }
    });
    return c;
}

Matrix matmul_tn(const Matrix& a, const Matrix& b) {
    require_shape(a.rows() == b.rows(), "matmul_tn: row count mismatch");
    Matrix c(a.cols(), b.cols());
    const auto& k = simd::active();
    const std::size_t width = b.cols();
    parallel_rows(a.cols(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = 0; i < a.rows(); ++i) {
            const double* bi = b.row(i).data();
            for (std::size_t p = begin; p < end; ++p) {
                const double s = a(i, p);
                if (s != 0.0) k.axpy(s, bi, c.row(p).data(), width);
            }
        }
    });
    return c;
}

Matrix gram(const Matrix& x) {
    const std::size_t n = x.rows();
    Matrix g(n, n);
    const auto& k = simd::active();
    parallel_rows(n, [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            for (std::size_t j = i; j < n; ++j) g(i, j) = k.dot(x.row(i).data(), x.row(j).data(), x.cols());
    });
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) g(i, j) = g(j, i);
    return g;
}

double frobenius_dot(const Matrix& a, const Matrix& b) {
    require_shape(a.rows() == b.rows() && a.cols() == b.cols(), "frobenius_dot: shape mismatch");
    return simd::active().dot(a.data(), b.data(), a.size());
}

void add_scaled(Matrix& dst, double alpha, const Matrix& src) {
    require_shape(dst.rows() == src.rows() && dst.cols() == src.cols(), "add_scaled: shape mismatch");
    simd::active().axpy(alpha, src.data(), dst.data(), dst.size());
}

std::vector<double> row_sums(const Matrix& m) {
    std::vector<double> s(m.rows(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (double v : m.row(i)) s[i] += v;
    return s;
}

std::vector<double> column_sums(const Matrix& m) {
    std::vector<double> s(m.cols(), 0.0);
    for (std::size_t i = 0; i < m.rows(); ++i) {
        const auto r = m.row(i);
        for (std::size_t j = 0; j < m.cols(); ++j) s[j] += r[j];
    }
    return s;
}

} // namespace cdcg::linalg
