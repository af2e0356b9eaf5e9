#include <doctest.h>

#include <vector>

#include "cdcg/linalg.hpp"
#include "cdcg/simd/kernels.hpp"
#include "support.hpp"

using namespace cdcg;
using testsupport::random_matrix;

namespace {

std::vector<double> random_vec(std::size_t n, Rng& rng) {
    std::uniform_real_distribution<double> u(-2.0, 2.0);
    std::vector<double> v(n);
    for (double& x : v) x = u(rng);
    return v;
}

// Restores the active table when a test switches it.
struct TableGuard {
    simd::Isa saved = simd::active().isa;
    ~TableGuard() { simd::select(saved); }
};

} // namespace

TEST_CASE("scalar kernels match plain loops") {
    Rng rng(1);
    const auto& t = simd::scalar_table();
    for (std::size_t n : {0u, 1u, 3u, 17u, 64u}) {
        const auto a = random_vec(n, rng);
        const auto b = random_vec(n, rng);
        double dot = 0.0, sq = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            dot += a[i] * b[i];
            sq += (a[i] - b[i]) * (a[i] - b[i]);
        }
        CHECK(t.dot(a.data(), b.data(), n) == dot);
        CHECK(t.squared_distance(a.data(), b.data(), n) == sq);
        auto y = b;
        t.axpy(0.5, a.data(), y.data(), n);
        for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == b[i] + 0.5 * a[i]);
    }
}

TEST_CASE("vector kernels agree with the scalar reference") {
    const simd::KernelTable* variants[] = {simd::avx2_table(), simd::neon_table()};
    bool any = false;
    Rng rng(2);
    for (const auto* t : variants) {
        if (!t) continue;
        any = true;
        INFO("variant " << t->name);
        const auto& ref = simd::scalar_table();
        // Lengths cover the unrolled body, the 4-wide tail and the scalar tail.
        for (std::size_t n = 0; n <= 70; ++n) {
            const auto a = random_vec(n, rng);
            const auto b = random_vec(n, rng);
            const double tol = 1e-13 * static_cast<double>(n + 1) * 4.0;
            CHECK(t->dot(a.data(), b.data(), n) == doctest::Approx(ref.dot(a.data(), b.data(), n)).epsilon(tol));
            CHECK(t->squared_distance(a.data(), b.data(), n) ==
                  doctest::Approx(ref.squared_distance(a.data(), b.data(), n)).epsilon(tol));
            auto y1 = b, y2 = b;
            t->axpy(-1.25, a.data(), y1.data(), n);
            ref.axpy(-1.25, a.data(), y2.data(), n);
            for (std::size_t i = 0; i < n; ++i) CHECK(y1[i] == doctest::Approx(y2[i]).epsilon(1e-15));
        }
    }
    if (!any) MESSAGE("no vector variant on this machine; only the scalar table was exercised");
}

TEST_CASE("kernel table selection") {
    TableGuard guard;
    CHECK(simd::select(simd::Isa::Scalar));
    CHECK(simd::active().isa == simd::Isa::Scalar);
    if (simd::avx2_table()) {
        CHECK(simd::select(simd::Isa::Avx2));
        CHECK(simd::active().isa == simd::Isa::Avx2);
    } else {
        CHECK_FALSE(simd::select(simd::Isa::Avx2));
    }
    if (!simd::neon_table()) CHECK_FALSE(simd::select(simd::Isa::Neon));
    CHECK(simd::best_available() != simd::Isa::Neon);  // x86 build host
}

TEST_CASE("dense products match a naive triple loop") {
    Rng rng(3);
    for (auto [n, k, m] : {std::tuple{5u, 7u, 3u}, {40u, 13u, 50u}, {1u, 1u, 1u}, {33u, 64u, 16u}}) {
        const Matrix a = random_matrix(n, k, rng);
        const Matrix b = random_matrix(k, m, rng);
        CHECK(testsupport::max_abs_diff(linalg::matmul(a, b), testsupport::naive_matmul(a, b)) < 1e-12);
        const Matrix at = a.transposed();
        CHECK(testsupport::max_abs_diff(linalg::matmul_tn(at, b), testsupport::naive_matmul(a, b)) < 1e-12);
        const Matrix bt = b.transposed();
        CHECK(testsupport::max_abs_diff(linalg::matmul_nt(a, bt), testsupport::naive_matmul(a, b)) < 1e-12);
    }
}

TEST_CASE("gram is exactly symmetric and matches X X^T") {
    Rng rng(4);
    const Matrix x = random_matrix(23, 9, rng);
    const Matrix g = linalg::gram(x);
    CHECK(g == g.transposed());
    CHECK(testsupport::max_abs_diff(g, testsupport::naive_matmul(x, x.transposed())) < 1e-12);
}

TEST_CASE("thread count does not change results") {
    Rng rng(5);
    const Matrix a = random_matrix(300, 40, rng);
    const Matrix b = random_matrix(40, 70, rng);
    const unsigned saved = linalg::num_threads();
    linalg::set_num_threads(1);
    const Matrix p1 = linalg::matmul(a, b);
    const Matrix g1 = linalg::gram(a);
    linalg::set_num_threads(4);
    const Matrix p4 = linalg::matmul(a, b);
    const Matrix g4 = linalg::gram(a);
    linalg::set_num_threads(saved);
    CHECK(p1 == p4);
    CHECK(g1 == g4);
}

TEST_CASE("sums and frobenius product") {
    const Matrix m{{1, 2, 3}, {4, 5, 6}};
    CHECK(linalg::row_sums(m) == std::vector<double>{6, 15});
    CHECK(linalg::column_sums(m) == std::vector<double>{5, 7, 9});
    CHECK(linalg::frobenius_dot(m, m) == 91.0);
    Matrix d(2, 3);
    linalg::add_scaled(d, 2.0, m);
    CHECK(d(1, 2) == 12.0);
}
