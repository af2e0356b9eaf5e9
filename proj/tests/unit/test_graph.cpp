#include <doctest.h>

#include <cmath>

#include "cdcg/error.hpp"
#include "cdcg/graph.hpp"
#include "cdcg/linalg.hpp"
#include "support.hpp"

using namespace cdcg;

namespace {

ExpressionMatrix prepared(Matrix m) { return make_expression(std::move(m), true); }

Matrix random_affinity(std::size_t n, Rng& rng) {
    Matrix w = testsupport::random_matrix(n, n, rng, 0.0, 1.0);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < i; ++j) w(i, j) = w(j, i);
    return w;
}

} // namespace

TEST_CASE("probability metric matrix examples") {
    CHECK(probability_metric_matrix(prepared(Matrix::identity(2))) == Matrix::identity(2));
    CHECK(probability_metric_matrix(prepared(Matrix{{1, 0}, {0, 1}, {1, 1}})) ==
          Matrix{{1, 0, 1}, {0, 1, 1}, {1, 1, 2}});
    CHECK(probability_metric_matrix(prepared(Matrix(3, 2))) == Matrix(3, 3));
    // Negative inner products are clamped.
    const Matrix c = probability_metric_matrix(prepared(Matrix{{1, 0}, {-1, 0.5}}));
    CHECK(c(0, 1) == 0.0);
    CHECK(c(1, 0) == 0.0);
}

TEST_CASE("spatial metric matrix examples") {
    const Matrix s = spatial_metric_matrix(prepared(Matrix{{1, 0}, {0, 1}, {1, 1}, {1, 0}, {0, 0}}));
    CHECK(s(0, 3) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(s(0, 1) == 0.0);
    CHECK(s(0, 2) == doctest::Approx(1.0 / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(s(4, 4) == 1.0);
    CHECK(s(4, 0) == 0.0);
    CHECK(s == s.transposed());
}

TEST_CASE("graph construction requires preprocessed input") {
    const ExpressionMatrix raw = make_expression(Matrix{{1, 0}, {0, 1}});
    CHECK_THROWS_AS(probability_metric_matrix(raw), Error);
    CHECK_THROWS_AS(spatial_metric_matrix(raw), Error);
}

TEST_CASE("normalized Laplacian closed forms") {
    const Matrix l = normalized_laplacian(Matrix{{0, 1}, {1, 0}});
    CHECK(l == Matrix{{1, -1}, {-1, 1}});
    const auto ev = testsupport::eigenvalues(l);
    CHECK(ev(0) == doctest::Approx(0.0));
    CHECK(ev(1) == doctest::Approx(2.0));
    CHECK(normalized_laplacian(Matrix::identity(3)) == Matrix(3, 3));
}

TEST_CASE("normalized Laplacian spectrum on random affinities") {
    Rng rng(11);
    for (int t = 0; t < 20; ++t) {
        const Matrix w = random_affinity(10, rng);
        const Matrix l = normalized_laplacian(w);
        CHECK(l == l.transposed());
        const auto ev = testsupport::eigenvalues(l);
        CHECK(ev(0) == doctest::Approx(0.0).epsilon(1e-8).scale(1.0));
        CHECK(ev.minCoeff() >= -1e-8);
        CHECK(ev.maxCoeff() <= 2.0 + 1e-8);
        // D^{1/2} 1 spans the null space.
        const auto d = degrees(w);
        Matrix v(10, 1);
        for (std::size_t i = 0; i < 10; ++i) v(i, 0) = std::sqrt(d[i]);
        const Matrix lv = linalg::matmul(l, v);
        for (double x : lv.values()) CHECK(std::abs(x) < 1e-12);
    }
}

TEST_CASE("zero-degree nodes: repair or fail") {
    Matrix w{{0, 1, 0}, {1, 0, 0}, {0, 0, 0}};
    GraphOptions strict;
    strict.repair_isolated = false;
    try {
        normalized_laplacian(w, strict);
        FAIL("expected DegenerateGraph");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::DegenerateGraph);
    }
    CHECK_THROWS_AS(normalized_laplacian(w), Error);
    const Matrix l = normalized_laplacian(w, GraphOptions{});
    CHECK(l(2, 2) == doctest::Approx(0.0));
    repair_isolated_nodes(w, GraphOptions{});
    CHECK(w(2, 2) == 1e-8);
}

TEST_CASE("exact normalized cut examples") {
    Rng rng(12);
    const Matrix w = random_affinity(6, rng);
    CHECK(ncut_value({0, 0, 0, 0, 0, 0}, w) == 0.0);

    Matrix cliques(4, 4);
    cliques(0, 1) = cliques(1, 0) = 1.0;
    cliques(2, 3) = cliques(3, 2) = 2.0;
    CHECK(ncut_value({0, 0, 1, 1}, cliques) == 0.0);

    CHECK(ncut_value({0, 1}, Matrix{{0, 1}, {1, 0}}) == doctest::Approx(1.0));

    Matrix lonely(3, 3);
    lonely(0, 1) = lonely(1, 0) = 1.0;
    try {
        ncut_value({0, 0, 1}, lonely);
        FAIL("expected EmptyVolume");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::EmptyVolume);
    }
}

TEST_CASE("normalized cut is invariant under relabeling") {
    Rng rng(13);
    const Matrix w = random_affinity(8, rng);
    const Labels a{0, 1, 2, 0, 1, 2, 2, 0};
    const Labels b{5, 3, 9, 5, 3, 9, 9, 5};
    CHECK(ncut_value(a, w) == doctest::Approx(ncut_value(b, w)).epsilon(1e-14));
}

TEST_CASE("graph pair on the toy input") {
    const GraphPair g = build_graph_pair(prepared(Matrix{{1, 0}, {0, 1}, {1, 1}}));
    CHECK(std::abs(testsupport::eigenvalues(g.lap_c)(0)) < 1e-10);
    CHECK(std::abs(testsupport::eigenvalues(g.lap_s)(0)) < 1e-10);
    for (double d : g.deg_c) CHECK(d > 0.0);
    CHECK(g.c_matrix == g.c_matrix.transposed());
    CHECK(g.s_matrix == g.s_matrix.transposed());
}

TEST_CASE("sparsify with k = n equals the dense graph") {
    Rng rng(14);
    const ExpressionMatrix x = prepared(testsupport::random_matrix(7, 4, rng, 0.0, 2.0));
    GraphOptions opts;
    opts.sparsify_top_k = 7;
    const GraphPair dense = build_graph_pair(x);
    const GraphPair sparse = build_graph_pair(x, opts);
    CHECK(dense.lap_c == sparse.lap_c);
    CHECK(dense.lap_s == sparse.lap_s);

    const Matrix w = random_affinity(6, rng);
    const Matrix s2 = sparsify_top_k(w, 2);
    CHECK(s2 == s2.transposed());
    for (std::size_t i = 0; i < 6; ++i) {
        int kept = 0;
        for (std::size_t j = 0; j < 6; ++j) kept += s2(i, j) > 0.0;
        CHECK(kept >= 2);
    }
}

TEST_CASE("identical cells: unit cosine and the most negative Laplacian entry") {
    const ExpressionMatrix x = prepared(Matrix{{1, 2, 0}, {1, 2, 0}, {0, 1, 3}, {2, 0, 1}});
    const GraphPair g = build_graph_pair(x);
    CHECK(g.s_matrix(0, 1) == doctest::Approx(1.0).epsilon(1e-15));
    for (std::size_t j = 2; j < 4; ++j) CHECK(g.lap_s(0, 1) < g.lap_s(0, j));
}

TEST_CASE("scaling X leaves S and L_C unchanged and scales C quadratically") {
    Rng rng(15);
    const Matrix x = testsupport::random_matrix(9, 5, rng, 0.0, 3.0);
    Matrix x3 = x;
    for (double& v : x3.values()) v *= 3.0;
    const GraphPair a = build_graph_pair(prepared(x));
    const GraphPair b = build_graph_pair(prepared(x3));
    CHECK(testsupport::max_abs_diff(a.s_matrix, b.s_matrix) < 1e-12);
    Matrix c9 = a.c_matrix;
    for (double& v : c9.values()) v *= 9.0;
    CHECK(testsupport::max_abs_diff(c9, b.c_matrix) < 1e-10 * 100);
    CHECK(testsupport::max_abs_diff(a.lap_c, b.lap_c) < 1e-10);
}

TEST_CASE("trace form is nonnegative on constructed Laplacians") {
    Rng rng(16);
    const GraphPair g = build_graph_pair(prepared(testsupport::random_matrix(12, 6, rng, 0.0, 2.0)));
    const Matrix l = mixed_laplacian(g, 0.3);
    for (int t = 0; t < 50; ++t) {
        const Matrix h = testsupport::random_matrix(12, 3, rng, -5.0, 5.0);
        CHECK(linalg::frobenius_dot(h, linalg::matmul(l, h)) >= -1e-10);
    }
}
