// Compiled with -mavx2 -mfma; only reached after a runtime CPU check.
#include "kernels_impl.hpp"

#include <immintrin.h>

#include <algorithm>

namespace grabp::kernels::detail {

namespace {

inline double hsum(__m256d v) {
    const __m128d lo = _mm256_castpd256_pd128(v);
    const __m128d hi = _mm256_extractf128_pd(v, 1);
    const __m128d s = _mm_add_pd(lo, hi);
    return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t n) {
    __m256d acc0 = _mm256_setzero_pd();
    __m256d acc1 = _mm256_setzero_pd();
    std::size_t i = 0;
    for (; i + 8 <= n; i += 8) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4), acc1);
    }
    if (i + 4 <= n) {
        acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i), acc0);
        i += 4;
    }
    double s = hsum(_mm256_add_pd(acc0, acc1));
    for (; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_avx2(double alpha, const double* x, double* y, std::size_t n) {
    const __m256d va = _mm256_set1_pd(alpha);
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        _mm256_storeu_pd(y + i, _mm256_fmadd_pd(va, _mm256_loadu_pd(x + i), _mm256_loadu_pd(y + i)));
    }
    for (; i < n; ++i) y[i] += alpha * x[i];
}

double gather_dot_avx2(const double* vals, const Index* idx, std::size_t nnz, const double* x) {
    __m256d acc = _mm256_setzero_pd();
    std::size_t k = 0;
    for (; k + 4 <= nnz; k += 4) {
        const __m128i vi = _mm_loadu_si128(reinterpret_cast<const __m128i*>(idx + k));
        const __m256d xv = _mm256_i32gather_pd(x, vi, 8);
        acc = _mm256_fmadd_pd(_mm256_loadu_pd(vals + k), xv, acc);
    }
    double s = hsum(acc);
    for (; k < nnz; ++k) s += vals[k] * x[idx[k]];
    return s;
}

double positive_sum_sq_avx2(const double* v, std::size_t n) {
    const __m256d zero = _mm256_setzero_pd();
    __m256d acc = zero;
    std::size_t i = 0;
    for (; i + 4 <= n; i += 4) {
        const __m256d p = _mm256_max_pd(_mm256_loadu_pd(v + i), zero);
        acc = _mm256_fmadd_pd(p, p, acc);
    }
    double s = hsum(acc);
    for (; i < n; ++i) {
        const double p = std::max(0.0, v[i]);
        s += p * p;
    }
    return s;
}

}  // namespace grabp::kernels::detail
