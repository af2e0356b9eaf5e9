#pragma once

// Inner-loop kernels behind every dense product in the library.
//
// Each kernel has a scalar reference in kernels_scalar.cpp and vector variants
// (AVX2+FMA on x86-64, NEON on aarch64) compiled in their own translation
// units. The active table is chosen once at first use from the CPU features,
// and can be overridden with CDCG_SIMD=scalar|avx2|neon or select().
//
// Variants are not bit-identical to the reference (different summation order
// and fused multiply-add), only equal within rounding. A given table is fully
// deterministic, so runs on the same machine and table reproduce exactly.

#include <cstddef>

namespace cdcg::simd {

enum class Isa { Scalar, Avx2, Neon };

struct KernelTable {
    Isa isa;
    const char* name;
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    double (*squared_distance)(const double* a, const double* b, std::size_t n);
};

const KernelTable& scalar_table() noexcept;

/// nullptr when the variant was not compiled in or the CPU lacks the ISA.
const KernelTable* avx2_table() noexcept;
const KernelTable* neon_table() noexcept;

const KernelTable& active() noexcept;

/// Switch the active table. Returns false (and changes nothing) if the
/// requested variant is unavailable on this machine.
bool select(Isa isa) noexcept;

/// Best table available on this CPU, ignoring any override.
Isa best_available() noexcept;

namespace detail {
// Definitions live in the per-ISA translation units.
double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double squared_distance_scalar(const double* a, const double* b, std::size_t n);

#if defined(CDCG_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double squared_distance_avx2(const double* a, const double* b, std::size_t n);
#endif

#if defined(CDCG_HAVE_NEON)
double dot_neon(const double* a, const double* b, std::size_t n);
void axpy_neon(double alpha, const double* x, double* y, std::size_t n);
double squared_distance_neon(const double* a, const double* b, std::size_t n);
#endif
} // namespace detail

} // namespace cdcg::simd
