#pragma once

// Inner-loop arithmetic kernels shared by every solver.
//
// Each kernel has a portable scalar reference implementation and, on x86-64,
// an AVX2+FMA variant. The variant is chosen once at first use from the
// CPU feature bits; setting GRABP_SIMD=scalar in the environment forces the
// reference path. Both paths are covered by the equivalence tests in
// tests/test_kernels.cpp.

#include <cstddef>
#include <cstdint>
#include <string_view>

namespace grabp::kernels {

using Index = std::int32_t;

struct KernelTable {
    const char* name;

    // sum_i a[i] * b[i]
    double (*dot)(const double* a, const double* b, std::size_t n);
    // y += alpha * x
    void (*axpy)(double alpha, const double* x, double* y, std::size_t n);
    // sum_k vals[k] * x[idx[k]]
    double (*gather_dot)(const double* vals, const Index* idx, std::size_t nnz, const double* x);
    // y[idx[k]] += alpha * vals[k]
    void (*scatter_axpy)(double alpha, const double* vals, const Index* idx, std::size_t nnz, double* y);
    // sum_i max(0, v[i])^2
    double (*positive_sum_sq)(const double* v, std::size_t n);
};

const KernelTable& scalar_table();

// nullptr when the build has no AVX2 variant or the CPU lacks AVX2/FMA.
const KernelTable* avx2_table();

// The table every library routine calls through.
const KernelTable& active();

// Switch the active table: "scalar", "avx2" or "auto". Returns false when the
// requested variant is unavailable (the active table is left unchanged).
bool select(std::string_view which);

}  // namespace grabp::kernels
