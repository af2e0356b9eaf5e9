#include "cdcg/graph.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "cdcg/error.hpp"
#include "cdcg/linalg.hpp"

namespace cdcg {

namespace {

void require_preprocessed(const ExpressionMatrix& x) {
    if (!x.is_preprocessed) throw_error(ErrorKind::Validation, "graph construction needs preprocessed data");
}

void require_square(const Matrix& w, const char* what) {
    require_shape(w.rows() == w.cols(), std::string(what) + ": matrix must be square");
}

} // namespace

Matrix probability_metric_matrix(const Matrix& x) {
    Matrix c = linalg::gram(x);
    for (double& v : c.values()) v = std::max(v, 0.0);
    return c;
}

Matrix probability_metric_matrix(const ExpressionMatrix& x) {
    require_preprocessed(x);
    return probability_metric_matrix(x.values);
}

Matrix spatial_metric_matrix(const Matrix& x) {
    Matrix s = linalg::gram(x);
    const std::size_t n = s.rows();
    std::vector<double> norm(n);
    for (std::size_t i = 0; i < n; ++i) norm[i] = std::sqrt(s(i, i));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            double v = 0.0;
            if (norm[i] > 0.0 && norm[j] > 0.0) v = std::clamp(s(i, j) / (norm[i] * norm[j]), 0.0, 1.0);
            s(i, j) = v;
            s(j, i) = v;
        }
        s(i, i) = 1.0;
    }
    return s;
}

Matrix spatial_metric_matrix(const ExpressionMatrix& x) {
    require_preprocessed(x);
    return spatial_metric_matrix(x.values);
}

Matrix sparsify_top_k(const Matrix& w, std::size_t k) {
    require_square(w, "sparsify_top_k");
    if (k == 0) throw_error(ErrorKind::Config, "sparsify_top_k must be positive");
    const std::size_t n = w.rows();
    if (k >= n) return w;
    Matrix kept(n, n);
    std::vector<std::size_t> idx(n);
    for (std::size_t i = 0; i < n; ++i) {
        std::iota(idx.begin(), idx.end(), 0);
        const auto r = w.row(i);
        std::nth_element(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k), idx.end(),
                         [&](std::size_t a, std::size_t b) { return r[a] > r[b] || (r[a] == r[b] && a < b); });
        for (std::size_t t = 0; t < k; ++t) kept(i, idx[t]) = r[idx[t]];
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = std::max(kept(i, j), kept(j, i));
            kept(i, j) = v;
            kept(j, i) = v;
        }
    }
    return kept;
}

std::vector<double> degrees(const Matrix& w) { return linalg::row_sums(w); }

void repair_isolated_nodes(Matrix& w, const GraphOptions& opts) {
    require_square(w, "repair_isolated_nodes");
    const auto deg = degrees(w);
    for (std::size_t i = 0; i < deg.size(); ++i) {
        if (deg[i] > 0.0) continue;
        if (!opts.repair_isolated)
            throw_error(ErrorKind::DegenerateGraph, "node " + std::to_string(i) + " has zero degree");
        w(i, i) += opts.repair_weight;
    }
}

Matrix normalized_laplacian(const Matrix& w) {
    require_square(w, "normalized_laplacian");
    const std::size_t n = w.rows();
    const auto deg = degrees(w);
    std::vector<double> inv_sqrt(n);
    for (std::size_t i = 0; i < n; ++i) {
        if (!(deg[i] > 0.0)) throw_error(ErrorKind::DegenerateGraph, "node " + std::to_string(i) + " has zero degree");
        inv_sqrt[i] = 1.0 / std::sqrt(deg[i]);
    }
    Matrix lap(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        lap(i, i) = 1.0 - w(i, i) * inv_sqrt[i] * inv_sqrt[i];
        for (std::size_t j = i + 1; j < n; ++j) {
            const double v = -w(i, j) * inv_sqrt[i] * inv_sqrt[j];
            lap(i, j) = v;
            lap(j, i) = v;
        }
    }
    return lap;
}

Matrix normalized_laplacian(Matrix w, const GraphOptions& opts) {
    repair_isolated_nodes(w, opts);
    return normalized_laplacian(w);
}

double ncut_value(const Labels& labels, const Matrix& w) {
    require_square(w, "ncut_value");
    require_shape(labels.size() == w.rows(), "ncut_value: label count must equal node count");
    int k = 0;
    const Labels ids = compact_labels(labels, &k);
    std::vector<double> vol(static_cast<std::size_t>(k), 0.0);
    std::vector<double> cut(static_cast<std::size_t>(k), 0.0);
    for (std::size_t i = 0; i < w.rows(); ++i) {
        const auto ci = static_cast<std::size_t>(ids[i]);
        for (std::size_t j = 0; j < w.cols(); ++j) {
            vol[ci] += w(i, j);
            if (ids[j] != ids[i]) cut[ci] += w(i, j);
        }
    }
    double total = 0.0;
    for (std::size_t c = 0; c < vol.size(); ++c) {
        if (!(vol[c] > 0.0)) throw_error(ErrorKind::EmptyVolume, "cluster " + std::to_string(c) + " has zero volume");
        total += cut[c] / vol[c];
    }
    return 0.5 * total;
}

GraphPair build_graph_pair(const ExpressionMatrix& x, const GraphOptions& opts) {
    require_preprocessed(x);
    GraphPair g;
    g.c_matrix = probability_metric_matrix(x.values);
    g.s_matrix = spatial_metric_matrix(x.values);
    if (opts.sparsify_top_k) {
        g.c_matrix = sparsify_top_k(g.c_matrix, *opts.sparsify_top_k);
        g.s_matrix = sparsify_top_k(g.s_matrix, *opts.sparsify_top_k);
    }
    repair_isolated_nodes(g.c_matrix, opts);
    repair_isolated_nodes(g.s_matrix, opts);
    g.deg_c = degrees(g.c_matrix);
    g.deg_s = degrees(g.s_matrix);
    g.lap_c = normalized_laplacian(g.c_matrix);
    g.lap_s = normalized_laplacian(g.s_matrix);
    return g;
}

Matrix mixed_laplacian(const GraphPair& g, double alpha) {
    require_shape(g.lap_c.rows() == g.lap_s.rows(), "mixed_laplacian: channel size mismatch");
    Matrix l(g.lap_c.rows(), g.lap_c.cols());
    if (alpha != 0.0) linalg::add_scaled(l, alpha, g.lap_c);
    if (alpha != 1.0) linalg::add_scaled(l, 1.0 - alpha, g.lap_s);
    return l;
}

} // namespace cdcg
