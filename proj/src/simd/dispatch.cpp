#include "cdcg/simd/kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace cdcg::simd {

namespace {

constexpr KernelTable kScalar{Isa::Scalar, "scalar", &detail::dot_scalar, &detail::axpy_scalar,
                              &detail::squared_distance_scalar};

#if defined(CDCG_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::Avx2, "avx2", &detail::dot_avx2, &detail::axpy_avx2,
                            &detail::squared_distance_avx2};

bool cpu_has_avx2() noexcept {
#if defined(__GNUC__)
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
    return false;
#endif
}
#endif

#if defined(CDCG_HAVE_NEON)
constexpr KernelTable kNeon{Isa::Neon, "neon", &detail::dot_neon, &detail::axpy_neon,
                            &detail::squared_distance_neon};
#endif

const KernelTable* table_for(Isa isa) noexcept {
    switch (isa) {
    case Isa::Scalar: return &kScalar;
    case Isa::Avx2: return avx2_table();
    case Isa::Neon: return neon_table();
    }
    return nullptr;
}

const KernelTable* initial_table() noexcept {
    if (const char* env = std::getenv("CDCG_SIMD")) {
        const std::string_view v(env);
        const KernelTable* t = nullptr;
        if (v == "scalar") t = &kScalar;
        else if (v == "avx2") t = avx2_table();
        else if (v == "neon") t = neon_table();
        if (t) return t;
    }
    return table_for(best_available());
}

std::atomic<const KernelTable*>& active_slot() noexcept {
    static std::atomic<const KernelTable*> slot{initial_table()};
    return slot;
}

} // namespace

const KernelTable& scalar_table() noexcept { return kScalar; }

const KernelTable* avx2_table() noexcept {
#if defined(CDCG_HAVE_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable* neon_table() noexcept {
#if defined(CDCG_HAVE_NEON)
    return &kNeon;
#else
    return nullptr;
#endif
}

Isa best_available() noexcept {
    if (avx2_table()) return Isa::Avx2;
    if (neon_table()) return Isa::Neon;
    return Isa::Scalar;
}

const KernelTable& active() noexcept { return *active_slot().load(std::memory_order_relaxed); }

bool select(Isa isa) noexcept {
    const KernelTable* t = table_for(isa);
    if (!t) return false;
    active_slot().store(t, std::memory_order_relaxed);
    return true;
}

} // namespace cdcg::simd
