#include "cdcg/assign.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdcg/error.hpp"
#include "cdcg/linalg.hpp"
#include "cdcg/objective.hpp"

namespace cdcg {

namespace {

// Squared distances n x K.
Matrix pairwise_sq_dist(const Matrix& h, const Matrix& centroids) {
    Matrix d(h.rows(), centroids.rows());
    linalg::parallel_rows(h.rows(), [&](std::size_t begin, std::size_t end) {
        for (std::size_t i = begin; i < end; ++i)
            for (std::size_t j = 0; j < centroids.rows(); ++j)
                d(i, j) = linalg::squared_distance(h.row(i), centroids.row(j));
    });
    return d;
}

} // namespace

Matrix soft_assign(const Matrix& h, const Matrix& centroids, double theta) {
    require_shape(h.cols() == centroids.cols(), "soft_assign: embedding and centroid widths differ");
    require_shape(centroids.rows() >= 1, "soft_assign: no centroids");
    if (!(theta > 0.0)) throw_error(ErrorKind::Config, "theta must be positive");
    const double expo = -(1.0 + theta) / 2.0;
    Matrix q = pairwise_sq_dist(h, centroids);
    for (std::size_t i = 0; i < q.rows(); ++i) {
        auto r = q.row(i);
        double top = -std::numeric_limits<double>::infinity();
        for (double& v : r) {
            v = expo * std::log1p(v / theta);
            top = std::max(top, v);
        }
        if (!std::isfinite(top)) {
            std::fill(r.begin(), r.end(), 1.0 / static_cast<double>(r.size()));
            continue;
        }
        double s = 0.0;
        for (double& v : r) {
            v = std::exp(v - top);
            s += v;
        }
        for (double& v : r) v /= s;
    }
    return q;
}

SoftAssignGrad soft_assign_backward(const Matrix& h, const Matrix& centroids, const Matrix& q, double theta,
                                    const Matrix& d_q) {
    const std::size_t n = h.rows();
    const std::size_t k = centroids.rows();
    const std::size_t d = h.cols();
    require_shape(q.rows() == n && q.cols() == k && d_q.rows() == n && d_q.cols() == k,
                  "soft_assign_backward: shape mismatch");
    SoftAssignGrad out{Matrix(n, d), Matrix(k, d)};
    const double coef = -(1.0 + theta) / 2.0;
    std::vector<double> diff(d);
    for (std::size_t i = 0; i < n; ++i) {
        const auto qi = q.row(i);
        const auto gi = d_q.row(i);
        double mean_g = 0.0;
        for (std::size_t j = 0; j < k; ++j) mean_g += qi[j] * gi[j];
        for (std::size_t j = 0; j < k; ++j) {
            // dL/dlog k_ij times dlog k_ij / d dist_ij.
            const double dist = linalg::squared_distance(h.row(i), centroids.row(j));
            const double s = qi[j] * (gi[j] - mean_g) * coef / (theta + dist);
            if (s == 0.0) continue;
            for (std::size_t t = 0; t < d; ++t) diff[t] = h(i, t) - centroids(j, t);
            linalg::axpy(2.0 * s, diff, out.d_h.row(i));
            linalg::axpy(-2.0 * s, diff, out.d_centroids.row(j));
        }
    }
    return out;
}

Matrix sdcn_target(const Matrix& q) {
    require_row_stochastic(q, "sdcn_target input");
    const auto f = linalg::column_sums(q);
    Matrix p(q.rows(), q.cols());
    for (std::size_t i = 0; i < q.rows(); ++i) {
        double s = 0.0;
        for (std::size_t j = 0; j < q.cols(); ++j) {
            const double v = f[j] > 0.0 ? q(i, j) * q(i, j) / f[j] : 0.0;
            p(i, j) = v;
            s += v;
        }
        for (std::size_t j = 0; j < q.cols(); ++j) p(i, j) /= s;
    }
    return p;
}

Labels argmax_rows(const Matrix& q) {
    Labels out(q.rows());
    for (std::size_t i = 0; i < q.rows(); ++i) {
        const auto r = q.row(i);
        out[i] = static_cast<int>(std::max_element(r.begin(), r.end()) - r.begin());
    }
    return out;
}

std::vector<double> estimate_pi(const Matrix& q, double floor) {
    if (!(floor > 0.0)) throw_error(ErrorKind::Config, "pi floor must be positive");
    std::vector<double> pi(q.cols(), 0.0);
    for (int j : argmax_rows(q)) pi[static_cast<std::size_t>(j)] += 1.0;
    double s = 0.0;
    for (double& v : pi) {
        v = std::max(v / static_cast<double>(q.rows()), floor);
        s += v;
    }
    for (double& v : pi) v /= s;
    return pi;
}

} // namespace cdcg
