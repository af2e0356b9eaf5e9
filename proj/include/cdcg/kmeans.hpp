#pragma once

#include <cstddef>

#include "cdcg/assign.hpp"
#include "cdcg/matrix.hpp"
#include "cdcg/rng.hpp"

namespace cdcg {

struct KMeansOptions {
    std::size_t restarts = 10;
    std::size_t max_iter = 300;
    /// Stop when no centroid moves by more than this (squared distance).
    double tol = 1e-10;
    double pi_floor = 1e-6;
};

/// Lloyd's algorithm with k-means++ seeding, best of `restarts` runs by
/// within-cluster sum of squares. A cluster that empties is reseeded with the
/// point farthest from its assigned centroid.
ClusterState kmeans(const Matrix& points, std::size_t k, const KMeansOptions& opts, Rng& rng);

/// Nearest centroid per row, lowest index on ties.
Labels nearest_centroid(const Matrix& points, const Matrix& centroids);

double within_cluster_ss(const Matrix& points, const Matrix& centroids, const Labels& labels);

} // namespace cdcg
