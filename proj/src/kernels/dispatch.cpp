#include "kernels_impl.hpp"

#include <atomic>
#include <cstdlib>
#include <string_view>

namespace grabp::kernels {

namespace {

constexpr KernelTable kScalar{
    "scalar",
    detail::dot_scalar,
    detail::axpy_scalar,
    detail::gather_dot_scalar,
    detail::scatter_axpy_scalar,
    detail::positive_sum_sq_scalar,
};

#if defined(GRABP_HAVE_AVX2)
// AVX2 has no scatter instruction; the reference loop is used for scatter_axpy.
constexpr KernelTable kAvx2{
    "avx2",
    detail::dot_avx2,
    detail::axpy_avx2,
    detail::gather_dot_avx2,
    detail::scatter_axpy_scalar,
    detail::positive_sum_sq_avx2,
};

bool cpu_has_avx2() {
    __builtin_cpu_init();
    return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
}
#endif

const KernelTable* initial_table() {
    const char* env = std::getenv("GRABP_SIMD");
    if (env != nullptr && std::string_view(env) == "scalar") return &kScalar;
    const KernelTable* simd = avx2_table();
    return simd != nullptr ? simd : &kScalar;
}

std::atomic<const KernelTable*>& current() {
    static std::atomic<const KernelTable*> table{initial_table()};
    return table;
}

}  // namespace

const KernelTable& scalar_table() { return kScalar; }

const KernelTable* avx2_table() {
#if defined(GRABP_HAVE_AVX2)
    static const bool ok = cpu_has_avx2();
    return ok ? &kAvx2 : nullptr;
#else
    return nullptr;
#endif
}

const KernelTable& active() { return *current().load(std::memory_order_acquire); }

bool select(std::string_view which) {
    const KernelTable* next = nullptr;
    if (which == "scalar") {
        next = &kScalar;
    } else if (which == "avx2") {
        next = avx2_table();
    } else if (which == "auto") {
        next = avx2_table() != nullptr ? avx2_table() : &kScalar;
    }
    if (next == nullptr) return false;
    current().store(next, std::memory_order_release);
    return true;
}

}  // namespace grabp::kernels
