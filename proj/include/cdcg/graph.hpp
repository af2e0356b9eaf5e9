#pragma once

// Dual-channel cell affinity graphs and their normalized Laplacians.
//
// Channel 1 (probability metric): C = X X^T, negatives clamped to zero.
// Channel 2 (spatial metric): pairwise cosine similarity, clamped to [0, 1].
// Both are dense weighted graphs; self-similarities stay on the diagonal.

#include <cstddef>
#include <optional>
#include <vector>

#include "cdcg/expr_data.hpp"
#include "cdcg/labels.hpp"
#include "cdcg/matrix.hpp"

namespace cdcg {

struct GraphOptions {
    /// Keep each row's k largest affinities, then resymmetrize with max.
    std::optional<std::size_t> sparsify_top_k;
    /// Give zero-degree nodes a self-loop instead of failing with DegenerateGraph.
    bool repair_isolated = true;
    double repair_weight = 1e-8;
};

struct GraphPair {
    Matrix c_matrix;
    Matrix s_matrix;
    std::vector<double> deg_c;
    std::vector<double> deg_s;
    Matrix lap_c;
    Matrix lap_s;
};

Matrix probability_metric_matrix(const Matrix& x);
Matrix probability_metric_matrix(const ExpressionMatrix& x);

/// Zero-norm rows have similarity 0 to every other row and 1 to themselves.
Matrix spatial_metric_matrix(const Matrix& x);
Matrix spatial_metric_matrix(const ExpressionMatrix& x);

Matrix sparsify_top_k(const Matrix& w, std::size_t k);

/// Adds the repair self-loop to every zero-degree node; throws DegenerateGraph
/// when disabled and such a node exists.
void repair_isolated_nodes(Matrix& w, const GraphOptions& opts);

std::vector<double> degrees(const Matrix& w);

/// L = I - D^{-1/2} W D^{-1/2}, exactly symmetric. Requires positive degrees.
Matrix normalized_laplacian(const Matrix& w);

/// Convenience: repair (per opts) then build the Laplacian.
Matrix normalized_laplacian(Matrix w, const GraphOptions& opts);

/// Exact normalized cut 1/2 * sum_k cut(V_k) / vol(V_k) of a labeling.
/// Throws EmptyVolume for a cluster with zero total edge weight.
double ncut_value(const Labels& labels, const Matrix& w);

GraphPair build_graph_pair(const ExpressionMatrix& x, const GraphOptions& opts = {});

/// alpha * L_C + (1 - alpha) * L_S.
Matrix mixed_laplacian(const GraphPair& g, double alpha);

} // namespace cdcg
