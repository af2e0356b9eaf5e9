#include "cdcg/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "cdcg/error.hpp"

namespace cdcg {

namespace {

void require_same_length(const Labels& pred, const Labels& truth) {
    if (pred.size() != truth.size())
        throw_error(ErrorKind::LengthMismatch, "label vectors differ in length (" + std::to_string(pred.size()) +
                                                   " vs " + std::to_string(truth.size()) + ")");
    if (pred.empty()) throw_error(ErrorKind::LengthMismatch, "label vectors are empty");
}

double choose2(double x) { return x * (x - 1.0) / 2.0; }

double entropy(const std::vector<double>& counts, double n) {
    double h = 0.0;
    for (double c : counts)
        if (c > 0.0) h -= (c / n) * std::log(c / n);
    return h;
}

} // namespace

Matrix contingency(const Labels& pred, const Labels& truth) {
    require_same_length(pred, truth);
    int kp = 0, kt = 0;
    const Labels p = compact_labels(pred, &kp);
    const Labels t = compact_labels(truth, &kt);
    Matrix table(static_cast<std::size_t>(kp), static_cast<std::size_t>(kt));
    for (std::size_t i = 0; i < p.size(); ++i) table(static_cast<std::size_t>(p[i]), static_cast<std::size_t>(t[i])) += 1.0;
    return table;
}

std::vector<int> hungarian_min_cost(const Matrix& cost) {
    // Shortest augmenting path with potentials, O(n^3), 1-based internally.
    const std::size_t rows = cost.rows();
    const std::size_t cols = cost.cols();
    const std::size_t n = std::max(rows, cols);
    auto at = [&](std::size_t i, std::size_t j) { return i < rows && j < cols ? cost(i, j) : 0.0; };

    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
    std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
    for (std::size_t i = 1; i <= n; ++i) {
        match[0] = i;
        std::size_t j0 = 0;
        std::vector<double> minv(n + 1, inf);
        std::vector<char> used(n + 1, 0);
        do {
            used[j0] = 1;
            const std::size_t i0 = match[j0];
            double delta = inf;
            std::size_t j1 = 0;
            for (std::size_t j = 1; j <= n; ++j) {
                if (used[j]) continue;
                const double cur = at(i0 - 1, j - 1) - u[i0] - v[j];
                if (cur < minv[j]) {
                    minv[j] = cur;
                    way[j] = j0;
                }
                if (minv[j] < delta) {
                    delta = minv[j];
                    j1 = j;
                }
            }
            for (std::size_t j = 0; j <= n; ++j) {
                if (used[j]) {
                    u[match[j]] += delta;
                    v[j] -= delta;
                } else {
                    minv[j] -= delta;
                }
            }
            j0 = j1;
        } while (match[j0] != 0);
        do {
            const std::size_t j1 = way[j0];
            match[j0] = match[j1];
            j0 = j1;
        } while (j0 != 0);
    }

    std::vector<int> assignment(rows, -1);
    for (std::size_t j = 1; j <= n; ++j) {
        const std::size_t i = match[j];
        if (i >= 1 && i <= rows && j <= cols) assignment[i - 1] = static_cast<int>(j - 1);
    }
    return assignment;
}

double accuracy(const Labels& pred, const Labels& truth) {
    const Matrix table = contingency(pred, truth);
    Matrix cost(table.rows(), table.cols());
    for (std::size_t k = 0; k < table.size(); ++k) cost.values()[k] = -table.values()[k];
    const auto assignment = hungarian_min_cost(cost);
    double hits = 0.0;
    for (std::size_t i = 0; i < assignment.size(); ++i)
        if (assignment[i] >= 0) hits += table(i, static_cast<std::size_t>(assignment[i]));
    return hits / static_cast<double>(pred.size());
}

double nmi(const Labels& pred, const Labels& truth) {
    const Matrix table = contingency(pred, truth);
    const double n = static_cast<double>(pred.size());
    std::vector<double> a(table.rows(), 0.0), b(table.cols(), 0.0);
    for (std::size_t i = 0; i < table.rows(); ++i)
        for (std::size_t j = 0; j < table.cols(); ++j) {
            a[i] += table(i, j);
            b[j] += table(i, j);
        }
    double mi = 0.0;
    for (std::size_t i = 0; i < table.rows(); ++i)
        for (std::size_t j = 0; j < table.cols(); ++j) {
            const double nij = table(i, j);
            if (nij > 0.0) mi += (nij / n) * std::log(n * nij / (a[i] * b[j]));
        }
    const double denom = 0.5 * (entropy(a, n) + entropy(b, n));
    if (denom <= 0.0) return table.rows() == table.cols() ? 1.0 : 0.0;
    return std::clamp(mi / denom, 0.0, 1.0);
}

double ari(const Labels& pred, const Labels& truth) {
    require_same_length(pred, truth);
    if (pred.size() < 2) throw_error(ErrorKind::LengthMismatch, "ari needs at least two points");
    const Matrix table = contingency(pred, truth);
    double index = 0.0, sum_a = 0.0, sum_b = 0.0;
    std::vector<double> a(table.rows(), 0.0), b(table.cols(), 0.0);
    for (std::size_t i = 0; i < table.rows(); ++i)
        for (std::size_t j = 0; j < table.cols(); ++j) {
            index += choose2(table(i, j));
            a[i] += table(i, j);
            b[j] += table(i, j);
        }
    for (double x : a) sum_a += choose2(x);
    for (double x : b) sum_b += choose2(x);
    const double pairs = choose2(static_cast<double>(pred.size()));
    const double expected = sum_a * sum_b / pairs;
    const double max_index = 0.5 * (sum_a + sum_b);
    const double denom = max_index - expected;
    if (denom == 0.0) return 1.0;
    return (index - expected) / denom;
}

ClusteringScores score_clustering(const Labels& pred, const Labels& truth) {
    return {accuracy(pred, truth), nmi(pred, truth), ari(pred, truth)};
}

} // namespace cdcg
