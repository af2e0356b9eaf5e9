#include <doctest.h>

#include <cmath>
#include <numeric>

#include "cdcg/assign.hpp"
#include "cdcg/error.hpp"
#include "cdcg/gradcheck.hpp"
#include "cdcg/kmeans.hpp"
#include "cdcg/linalg.hpp"
#include "cdcg/metrics.hpp"
#include "cdcg/sinkhorn.hpp"
#include "support.hpp"

using namespace cdcg;
using testsupport::random_matrix;

namespace {

void check_row_sums(const Matrix& m, double tol) {
    for (double s : linalg::row_sums(m)) CHECK(std::abs(s - 1.0) < tol);
}

// Sinkhorn fixed point in long double, run far past convergence.
std::vector<long double> reference_plan_2x2(const Matrix& q, const std::vector<double>& pi, double lambda) {
    long double k[2][2];
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) k[i][j] = std::pow(static_cast<long double>(q(i, j)), static_cast<long double>(lambda));
    long double u[2] = {1, 1}, v[2] = {1, 1};
    for (int it = 0; it < 20000; ++it) {
        for (int i = 0; i < 2; ++i) u[i] = 1.0L / (k[i][0] * v[0] + k[i][1] * v[1]);
        for (int j = 0; j < 2; ++j) v[j] = 2.0L * pi[j] / (k[0][j] * u[0] + k[1][j] * u[1]);
    }
    return {u[0] * k[0][0] * v[0], u[0] * k[0][1] * v[1], u[1] * k[1][0] * v[0], u[1] * k[1][1] * v[1]};
}

// Entropic transport objective whose minimizer is the Sinkhorn plan.
double entropic_cost(const double p[4], const Matrix& q, double lambda) {
    double f = 0.0;
    for (int t = 0; t < 4; ++t) {
        const double qv = q(static_cast<std::size_t>(t / 2), static_cast<std::size_t>(t % 2));
        if (p[t] > 0.0) f += -p[t] * std::log(qv) + p[t] * std::log(p[t]) / lambda;
    }
    return f;
}

} // namespace

TEST_CASE("soft assignment examples") {
    const Matrix c{{0, 0}, {2, 0}};
    const Matrix eq = soft_assign(Matrix{{1, 0}}, c, 1.0);
    CHECK(eq(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(eq(0, 1) == doctest::Approx(0.5).epsilon(1e-15));

    const Matrix q = soft_assign(Matrix{{0, 0}}, Matrix{{0, 0}, {1, 0}}, 1.0);
    CHECK(q(0, 0) == doctest::Approx(2.0 / 3.0).epsilon(1e-15));
    CHECK(q(0, 1) == doctest::Approx(1.0 / 3.0).epsilon(1e-15));
}

TEST_CASE("soft assignment rows sum to one, even far away") {
    Rng rng(1);
    Matrix h = random_matrix(30, 4, rng, -50, 50);
    h(0, 0) = 1e6;
    const Matrix q = soft_assign(h, random_matrix(5, 4, rng), 1.0);
    check_row_sums(q, 1e-12);
    for (double v : q.values()) CHECK(v >= 0.0);
}

TEST_CASE("soft assignment gradient matches finite differences") {
    Rng rng(2);
    for (double theta : {1.0, 2.5}) {
        Matrix h = random_matrix(6, 2, rng);
        Matrix c = random_matrix(3, 2, rng);
        const Matrix dq = random_matrix(6, 3, rng);
        const Matrix q = soft_assign(h, c, theta);
        const SoftAssignGrad g = soft_assign_backward(h, c, q, theta, dq);
        const ParamBlock blocks[] = {{"H", h.values(), g.d_h.values()}, {"C", c.values(), g.d_centroids.values()}};
        const auto rep =
            gradcheck([&] { return linalg::frobenius_dot(dq, soft_assign(h, c, theta)); }, blocks);
        CHECK(rep.max_rel_error < 1e-4);
    }
}

TEST_CASE("sdcn target examples") {
    const Matrix onehot{{1, 0}, {0, 1}, {1, 0}};
    CHECK(sdcn_target(onehot) == onehot);
    const Matrix half = sdcn_target(Matrix{{0.5, 0.5}});
    CHECK(half(0, 0) == doctest::Approx(0.5).epsilon(1e-15));

    // Hand computation: f = (1.2, 0.8).
    const Matrix p = sdcn_target(Matrix{{0.8, 0.2}, {0.4, 0.6}});
    CHECK(p(0, 0) == doctest::Approx(0.64 / 1.2 / (0.64 / 1.2 + 0.04 / 0.8)).epsilon(1e-14));
    CHECK(p(0, 0) == doctest::Approx(0.9143).epsilon(1e-4));
    CHECK(p(0, 1) == doctest::Approx(0.0857).epsilon(1e-3));
    CHECK(p(1, 0) == doctest::Approx(0.2286).epsilon(1e-3));
    CHECK(p(1, 1) == doctest::Approx(0.7714).epsilon(1e-4));
    check_row_sums(p, 1e-12);
}

TEST_CASE("mixing proportions") {
    const auto pi = estimate_pi(Matrix{{1, 0}, {1, 0}, {0, 1}, {1, 0}});
    CHECK(pi[0] == 0.75);
    CHECK(pi[1] == 0.25);

    const auto floored = estimate_pi(Matrix{{0.9, 0.1}, {0.8, 0.2}}, 1e-6);
    CHECK(floored[1] == doctest::Approx(1e-6 / (1.0 + 1e-6)).epsilon(1e-12));
    CHECK(floored[1] > 0.0);

    Rng rng(3);
    const Matrix q = testsupport::random_stochastic(40, 4, rng);
    const auto est = estimate_pi(q, 1e-12);
    std::vector<double> count(4, 0.0);
    for (std::size_t i = 0; i < 40; ++i) {
        std::size_t best = 0;
        for (std::size_t j = 1; j < 4; ++j)
            if (q(i, j) > q(i, best)) best = j;
        count[best] += 1.0;
    }
    for (std::size_t j = 0; j < 4; ++j)
        if (count[j] > 0) CHECK(est[j] == doctest::Approx(count[j] / 40.0).epsilon(1e-10));
    CHECK(std::accumulate(est.begin(), est.end(), 0.0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("argmax rows picks the lowest index on ties") {
    CHECK(argmax_rows(Matrix{{0.5, 0.5}, {0.2, 0.8}, {0.4, 0.3}}) == Labels{0, 1, 0});
}

TEST_CASE("sinkhorn: uniform input is a fixed point") {
    const Matrix q(6, 3, 1.0 / 3.0);
    const std::vector<double> pi(3, 1.0 / 3.0);
    const SinkhornResult r = sinkhorn_target(q, pi);
    for (double v : r.plan.values()) CHECK(v == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
    CHECK(r.report.converged);
}

TEST_CASE("sinkhorn: marginals hold after convergence") {
    Rng rng(4);
    const Matrix q = testsupport::random_stochastic(50, 4, rng);
    const std::vector<double> pi{0.1, 0.2, 0.3, 0.4};
    const SinkhornResult r = sinkhorn_target(q, pi);
    const auto rows = linalg::row_sums(r.plan);
    const auto cols = linalg::column_sums(r.plan);
    for (double s : rows) CHECK(std::abs(s - 1.0) < 1e-6);
    for (std::size_t j = 0; j < 4; ++j) CHECK(std::abs(cols[j] - 50.0 * pi[j]) < 1e-6);
    CHECK(marginal_violation(r.plan, pi) == doctest::Approx(r.report.violation));
}

TEST_CASE("sinkhorn: 2x2 against a long-double fixed point and a grid search") {
    const Matrix q{{0.7, 0.3}, {0.6, 0.4}};
    const std::vector<double> pi{0.5, 0.5};
    SinkhornOptions opts;
    opts.tol = 1e-14;
    opts.max_iter = 100000;
    const SinkhornResult r = sinkhorn_target(q, pi, opts);
    const auto ref = reference_plan_2x2(q, pi, 5.0);
    for (int t = 0; t < 4; ++t)
        CHECK(std::abs(r.plan.values()[static_cast<std::size_t>(t)] - static_cast<double>(ref[static_cast<std::size_t>(t)])) < 1e-9);

    // Every feasible plan is [[a, 1-a], [1-a, a]]; none beats the solver's.
    const double ours[4] = {r.plan(0, 0), r.plan(0, 1), r.plan(1, 0), r.plan(1, 1)};
    const double f_ours = entropic_cost(ours, q, 5.0);
    for (int s = 0; s <= 10000; ++s) {
        const double a = s / 10000.0;
        const double alt[4] = {a, 1 - a, 1 - a, a};
        CHECK(f_ours <= entropic_cost(alt, q, 5.0) + 1e-12);
    }
}

TEST_CASE("sinkhorn: row scaling of the kernel leaves the plan unchanged") {
    Rng rng(5);
    const Matrix q = testsupport::random_stochastic(8, 3, rng);
    const std::vector<double> pi{0.3, 0.3, 0.4};
    SinkhornOptions opts;
    opts.tol = 1e-12;
    opts.max_iter = 100000;
    Matrix scaled = q;
    // Scaling row i of Q^lambda by c is scaling row i of Q by c^(1/lambda).
    for (double& v : scaled.row(2)) v *= std::pow(7.0, 1.0 / opts.lambda);
    for (double& v : scaled.row(5)) v *= std::pow(0.01, 1.0 / opts.lambda);
    const Matrix a = sinkhorn_target(q, pi, opts).plan;
    const Matrix b = sinkhorn_target(scaled, pi, opts).plan;
    CHECK(testsupport::max_abs_diff(a, b) < 1e-9);
}

TEST_CASE("sinkhorn: large lambda keeps the argmax when capacities do not bind") {
    const Matrix q{{0.7, 0.2, 0.1}, {0.1, 0.8, 0.1}, {0.2, 0.1, 0.7}, {0.6, 0.3, 0.1},
                   {0.15, 0.7, 0.15}, {0.1, 0.25, 0.65}};
    const std::vector<double> pi(3, 1.0 / 3.0);
    SinkhornOptions opts;
    opts.lambda = 200.0;
    const SinkhornResult r = sinkhorn_target(q, pi, opts);
    CHECK(argmax_rows(r.plan) == argmax_rows(q));
}

TEST_CASE("sinkhorn: forced log domain agrees with the plain iteration") {
    Rng rng(6);
    const Matrix q = testsupport::random_stochastic(20, 3, rng);
    const std::vector<double> pi{0.25, 0.35, 0.4};
    SinkhornOptions opts;
    opts.tol = 1e-12;
    opts.max_iter = 100000;
    const SinkhornResult plain = sinkhorn_target(q, pi, opts);
    opts.force_log_domain = true;
    const SinkhornResult logd = sinkhorn_target(q, pi, opts);
    CHECK_FALSE(plain.report.used_log_domain);
    CHECK(logd.report.used_log_domain);
    CHECK(testsupport::max_abs_diff(plain.plan, logd.plan) < 1e-9);
}

TEST_CASE("sinkhorn: underflowing kernels fall back to the log domain") {
    Matrix q(4, 2);
    q(0, 0) = 1.0; q(0, 1) = 1e-30;
    q(1, 0) = 1.0; q(1, 1) = 1e-30;
    q(2, 0) = 1e-30; q(2, 1) = 1.0;
    q(3, 0) = 0.5; q(3, 1) = 0.5;
    const std::vector<double> pi{0.25, 0.75};
    SinkhornOptions opts;
    opts.lambda = 20.0;
    opts.max_iter = 20000;
    const SinkhornResult r = sinkhorn_target(q, pi, opts);
    CHECK(r.report.used_log_domain);
    CHECK(marginal_violation(r.plan, pi) < 1e-6);

    opts.allow_log_domain = false;
    try {
        sinkhorn_target(q, pi, opts);
        FAIL("expected NumericalUnderflow");
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::NumericalUnderflow);
    }
}

TEST_CASE("sinkhorn: iteration cap") {
    Rng rng(7);
    const Matrix q = testsupport::random_stochastic(30, 3, rng);
    const std::vector<double> pi{0.1, 0.3, 0.6};
    SinkhornOptions opts;
    opts.max_iter = 1;
    try {
        sinkhorn_target(q, pi, opts);
        FAIL("expected NoConvergence");
    } catch (const NoConvergenceError& e) {
        CHECK(e.violation() >= opts.tol);
    }
    opts.throw_on_no_convergence = false;
    const SinkhornResult r = sinkhorn_target(q, pi, opts);
    CHECK_FALSE(r.report.converged);
    CHECK(r.report.violation >= opts.tol);
    CHECK(r.report.iterations == 1);
}

TEST_CASE("kmeans: k = n puts every point on its own centroid") {
    Rng rng(8);
    const Matrix pts = random_matrix(7, 3, rng);
    Rng krng(9);
    const ClusterState st = kmeans(pts, 7, KMeansOptions{}, krng);
    CHECK(within_cluster_ss(pts, st.centroids, st.hard_labels) == 0.0);
    CHECK(num_distinct(st.hard_labels) == 7);
}

TEST_CASE("kmeans: duplicate pairs give exact centroids") {
    const Matrix pts{{0, 0}, {10, 10}, {0, 0}, {10, 10}};
    Rng rng(10);
    const ClusterState st = kmeans(pts, 2, KMeansOptions{}, rng);
    CHECK(st.hard_labels[0] == st.hard_labels[2]);
    CHECK(st.hard_labels[1] == st.hard_labels[3]);
    CHECK(st.hard_labels[0] != st.hard_labels[1]);
    const std::size_t a = static_cast<std::size_t>(st.hard_labels[0]);
    const std::size_t b = static_cast<std::size_t>(st.hard_labels[1]);
    CHECK(st.centroids(a, 0) == 0.0);
    CHECK(st.centroids(b, 1) == 10.0);
    CHECK(st.pi[0] == 0.5);
}

TEST_CASE("kmeans: separated blobs are recovered") {
    Rng rng(11);
    std::normal_distribution<double> noise(0.0, 0.3);
    const double centers[3][2] = {{0, 0}, {8, 0}, {0, 8}};
    Matrix pts(60, 2);
    Labels truth(60);
    for (std::size_t i = 0; i < 60; ++i) {
        const int c = static_cast<int>(i % 3);
        truth[i] = c;
        pts(i, 0) = centers[c][0] + noise(rng);
        pts(i, 1) = centers[c][1] + noise(rng);
    }
    Rng krng(12);
    const ClusterState st = kmeans(pts, 3, KMeansOptions{}, krng);
    CHECK(ari(st.hard_labels, truth) == 1.0);
    CHECK(nearest_centroid(pts, st.centroids) == st.hard_labels);
    double s = 0.0;
    for (double p : st.pi) s += p;
    CHECK(s == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("kmeans: invalid k") {
    Rng rng(13);
    CHECK_THROWS_AS(kmeans(Matrix{{1, 1}}, 2, KMeansOptions{}, rng), Error);
    CHECK_THROWS_AS(kmeans(Matrix{{1, 1}}, 0, KMeansOptions{}, rng), Error);
}
