#pragma once

// Dense products on top of the dispatched SIMD kernels.
//
// Every output row is produced by one worker with a fixed summation order, so
// results do not depend on the thread count.

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "cdcg/matrix.hpp"

namespace cdcg::linalg {

/// Worker threads used for row-blocked products. 1 means strictly sequential.
void set_num_threads(unsigned n) noexcept;
unsigned num_threads() noexcept;

/// Calls fn(begin, end) over a partition of [0, n).
void parallel_rows(std::size_t n, const std::function<void(std::size_t, std::size_t)>& fn);

double dot(std::span<const double> a, std::span<const double> b);
void axpy(double alpha, std::span<const double> x, std::span<double> y);
double squared_distance(std::span<const double> a, std::span<const double> b);

/// A * B
Matrix matmul(const Matrix& a, const Matrix& b);
/// A^T * B
Matrix matmul_tn(const Matrix& a, const Matrix& b);
/// A * B^T
Matrix matmul_nt(const Matrix& a, const Matrix& b);

/// X * X^T, computed on the upper triangle and mirrored (exactly symmetric).
Matrix gram(const Matrix& x);

/// Sum of elementwise products, i.e. trace(A^T B).
double frobenius_dot(const Matrix& a, const Matrix& b);

void add_scaled(Matrix& dst, double alpha, const Matrix& src);

std::vector<double> row_sums(const Matrix& m);
std::vector<double> column_sums(const Matrix& m);

} // namespace cdcg::linalg
