#pragma once

#include <cmath>
#include <filesystem>
#include <random>
#include <string>

#include <Eigen/Dense>

#include "cdcg/matrix.hpp"
#include "cdcg/rng.hpp"

namespace testsupport {

inline cdcg::Matrix random_matrix(std::size_t r, std::size_t c, cdcg::Rng& rng, double lo = -1.0, double hi = 1.0) {
    std::uniform_real_distribution<double> u(lo, hi);
    cdcg::Matrix m(r, c);
    for (double& v : m.values()) v = u(rng);
    return m;
}

inline cdcg::Matrix random_stochastic(std::size_t r, std::size_t c, cdcg::Rng& rng) {
    cdcg::Matrix m = random_matrix(r, c, rng, 0.05, 1.0);
    for (std::size_t i = 0; i < r; ++i) {
        double s = 0.0;
        for (double v : m.row(i)) s += v;
        for (double& v : m.row(i)) v /= s;
    }
    return m;
}

inline cdcg::Matrix naive_matmul(const cdcg::Matrix& a, const cdcg::Matrix& b) {
    cdcg::Matrix c(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i)
        for (std::size_t j = 0; j < b.cols(); ++j) {
            double s = 0.0;
            for (std::size_t k = 0; k < a.cols(); ++k) s += a(i, k) * b(k, j);
            c(i, j) = s;
        }
    return c;
}

inline double max_abs_diff(const cdcg::Matrix& a, const cdcg::Matrix& b) {
    double d = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
    return d;
}

inline Eigen::MatrixXd to_eigen(const cdcg::Matrix& m) {
    Eigen::MatrixXd e(m.rows(), m.cols());
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j) e(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = m(i, j);
    return e;
}

inline Eigen::VectorXd eigenvalues(const cdcg::Matrix& sym) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(to_eigen(sym));
    return solver.eigenvalues();
}

/// Fresh scratch directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
    auto p = std::filesystem::temp_directory_path() / ("cdcg_test_" + name);
    std::filesystem::remove_all(p);
    std::filesystem::create_directories(p);
    return p;
}

} // namespace testsupport
