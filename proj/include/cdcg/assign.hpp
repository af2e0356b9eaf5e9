#pragma once

// Student-t soft assignment of embeddings to centroids, the two target
// distributions built from it, and mixing-proportion estimation.

#include <span>
#include <vector>

#include "cdcg/labels.hpp"
#include "cdcg/matrix.hpp"

namespace cdcg {

struct ClusterState {
    Matrix centroids;        // K x d
    std::vector<double> pi;  // mixing proportions, sums to 1
    Labels hard_labels;      // length n, values in 0..K-1

    std::size_t k() const noexcept { return centroids.rows(); }
};

/// q_ij proportional to (1 + ||h_i - c_j||^2 / theta)^(-(1 + theta) / 2).
/// Rows are normalized in the log domain.
Matrix soft_assign(const Matrix& h, const Matrix& centroids, double theta);

struct SoftAssignGrad {
    Matrix d_h;          // n x d
    Matrix d_centroids;  // K x d
};

/// Chains an upstream gradient dL/dQ through soft_assign to H and the
/// centroids. `q` must be the soft_assign output for the same inputs.
SoftAssignGrad soft_assign_backward(const Matrix& h, const Matrix& centroids, const Matrix& q, double theta,
                                    const Matrix& d_q);

/// p_ij proportional to q_ij^2 / f_j with soft frequencies f_j = sum_i q_ij.
Matrix sdcn_target(const Matrix& q);

/// Fraction of rows whose argmax (lowest index on ties) is each column,
/// raised to `floor` and renormalized.
std::vector<double> estimate_pi(const Matrix& q, double floor = 1e-6);

/// Rowwise argmax, lowest index on ties.
Labels argmax_rows(const Matrix& q);

} // namespace cdcg
