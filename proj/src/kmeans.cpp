#include "cdcg/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

#include "cdcg/error.hpp"
#include "cdcg/linalg.hpp"

namespace cdcg {

namespace {

Matrix seed_plus_plus(const Matrix& points, std::size_t k, Rng& rng) {
    const std::size_t n = points.rows();
    Matrix centroids(k, points.cols());
    std::vector<double> best(n, std::numeric_limits<double>::infinity());
    std::vector<char> taken(n, 0);

    std::size_t pick = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
    for (std::size_t c = 0; c < k; ++c) {
        taken[pick] = 1;
        std::copy_n(points.row(pick).begin(), points.cols(), centroids.row(c).begin());
        if (c + 1 == k) break;
        double total = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            best[i] = std::min(best[i], linalg::squared_distance(points.row(i), centroids.row(c)));
            total += best[i];
        }
        if (total > 0.0) {
            double target = std::uniform_real_distribution<double>(0.0, total)(rng);
            pick = n;
            for (std::size_t i = 0; i < n; ++i) {
                if (best[i] <= 0.0) continue;
                pick = i;
                target -= best[i];
                if (target < 0.0) break;
            }
        } else {
            // Every remaining point coincides with a chosen centroid.
            std::vector<std::size_t> free;
            for (std::size_t i = 0; i < n; ++i)
                if (!taken[i]) free.push_back(i);
            pick = free[std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng)];
        }
    }
    return centroids;
}

struct LloydResult {
    Matrix centroids;
    Labels labels;
    double wcss;
};

LloydResult lloyd(const Matrix& points, Matrix centroids, const KMeansOptions& opts) {
    const std::size_t n = points.rows();
    const std::size_t k = centroids.rows();
    const std::size_t d = points.cols();
    Labels labels;
    for (std::size_t it = 0; it < opts.max_iter; ++it) {
        labels = nearest_centroid(points, centroids);

        Matrix next(k, d);
        std::vector<std::size_t> count(k, 0);
        for (std::size_t i = 0; i < n; ++i) {
            const auto c = static_cast<std::size_t>(labels[i]);
            ++count[c];
            linalg::axpy(1.0, points.row(i), next.row(c));
        }
        for (std::size_t c = 0; c < k; ++c) {
            if (count[c] > 0) {
                for (double& v : next.row(c)) v /= static_cast<double>(count[c]);
                continue;
            }
            // Empty cluster: take the point worst served by its centroid.
            std::size_t far = 0;
            double far_d = -1.0;
            for (std::size_t i = 0; i < n; ++i) {
                const auto li = static_cast<std::size_t>(labels[i]);
                if (count[li] <= 1) continue;
                const double dist = linalg::squared_distance(points.row(i), centroids.row(li));
                if (dist > far_d) {
                    far_d = dist;
                    far = i;
                }
            }
            --count[static_cast<std::size_t>(labels[far])];
            labels[far] = static_cast<int>(c);
            count[c] = 1;
            std::copy_n(points.row(far).begin(), d, next.row(c).begin());
        }

        double shift = 0.0;
        for (std::size_t c = 0; c < k; ++c)
            shift = std::max(shift, linalg::squared_distance(next.row(c), centroids.row(c)));
        centroids = std::move(next);
        if (shift <= opts.tol) break;
    }
    labels = nearest_centroid(points, centroids);
    const double wcss = within_cluster_ss(points, centroids, labels);
    return {std::move(centroids), std::move(labels), wcss};
}

} // namespace

Labels nearest_centroid(const Matrix& points, const Matrix& centroids) {
    require_shape(points.cols() == centroids.cols(), "nearest_centroid: width mismatch");
    Labels labels(points.rows());
    for (std::size_t i = 0; i < points.rows(); ++i) {
        double best = std::numeric_limits<double>::infinity();
        for (std::size_t c = 0; c < centroids.rows(); ++c) {
            const double dist = linalg::squared_distance(points.row(i), centroids.row(c));
            if (dist < best) {
                best = dist;
                labels[i] = static_cast<int>(c);
            }
        }
    }
    return labels;
}

double within_cluster_ss(const Matrix& points, const Matrix& centroids, const Labels& labels) {
    double s = 0.0;
    for (std::size_t i = 0; i < points.rows(); ++i)
        s += linalg::squared_distance(points.row(i), centroids.row(static_cast<std::size_t>(labels[i])));
    return s;
}

ClusterState kmeans(const Matrix& points, std::size_t k, const KMeansOptions& opts, Rng& rng) {
    if (k == 0 || k > points.rows())
        throw_error(ErrorKind::Config, "kmeans: k must lie in [1, n], got " + std::to_string(k));
    if (opts.restarts == 0 || opts.max_iter == 0) throw_error(ErrorKind::Config, "kmeans: restarts and max_iter >= 1");

    LloydResult best{Matrix(), Labels(), std::numeric_limits<double>::infinity()};
    for (std::size_t r = 0; r < opts.restarts; ++r) {
        LloydResult run = lloyd(points, seed_plus_plus(points, k, rng), opts);
        if (run.wcss < best.wcss) best = std::move(run);
    }

    ClusterState state;
    state.centroids = std::move(best.centroids);
    state.hard_labels = std::move(best.labels);
    state.pi.assign(k, 0.0);
    for (int l : state.hard_labels) state.pi[static_cast<std::size_t>(l)] += 1.0;
    double s = 0.0;
    for (double& p : state.pi) {
        p = std::max(p / static_cast<double>(points.rows()), opts.pi_floor);
        s += p;
    }
    for (double& p : state.pi) p /= s;
    return state;
}

} // namespace cdcg
