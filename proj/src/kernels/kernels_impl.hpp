#pragma once

#include "grabp/kernels.hpp"

namespace grabp::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n);
void axpy_scalar(double alpha, const double* x, double* y, std::size_t n);
double gather_dot_scalar(const double* vals, const Index* idx, std::size_t nnz, const double* x);
void scatter_axpy_scalar(double alpha, const double* vals, const Index* idx, std::size_t nnz, double* y);
double positive_sum_sq_scalar(const double* v, std::size_t n);

#if defined(GRABP_HAVE_AVX2)
double dot_avx2(const double* a, const double* b, std::size_t n);
void axpy_avx2(double alpha, const double* x, double* y, std::size_t n);
double gather_dot_avx2(const double* vals, const Index* idx, std::size_t nnz, const double* x);
double positive_sum_sq_avx2(const double* v, std::size_t n);
#endif

}  // namespace grabp::kernels::detail
