#pragma once

#include <vector>

#include "cdcg/labels.hpp"
#include "cdcg/matrix.hpp"

namespace cdcg {

/// Counts n_ij of points with pred cluster i and true class j, over the
/// compacted label ids.
Matrix contingency(const Labels& pred, const Labels& truth);

/// Minimum-cost perfect matching on a (zero-padded to square) cost matrix.
/// Returns, for every row, the matched column or -1 for padding columns.
std::vector<int> hungarian_min_cost(const Matrix& cost);

/// Best one-to-one cluster-to-class agreement fraction.
double accuracy(const Labels& pred, const Labels& truth);

/// Mutual information over the arithmetic mean of the two entropies (natural
/// log). Two constant labelings score 1.
double nmi(const Labels& pred, const Labels& truth);

/// Adjusted Rand index. A zero denominator (both labelings identical and
/// trivial) scores 1. Requires n >= 2.
double ari(const Labels& pred, const Labels& truth);

struct ClusteringScores {
    double acc = 0.0;
    double nmi = 0.0;
    double ari = 0.0;
};

ClusteringScores score_clustering(const Labels& pred, const Labels& truth);

} // namespace cdcg
