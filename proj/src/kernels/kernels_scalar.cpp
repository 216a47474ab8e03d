#include "kernels_impl.hpp"

#include <algorithm>

namespace grabp::kernels::detail {

double dot_scalar(const double* a, const double* b, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
    return s;
}

void axpy_scalar(double alpha, const double* x, double* y, std::size_t n) {
    for (std::size_t i = 0; i < n; ++i) y[i] += alpha * x[i];
}

double gather_dot_scalar(const double* vals, const Index* idx, std::size_t nnz, const double* x) {
    double s = 0.0;
    for (std::size_t k = 0; k < nnz; ++k) s += vals[k] * x[idx[k]];
    return s;
}

void scatter_axpy_scalar(double alpha, const double* vals, const Index* idx, std::size_t nnz, double* y) {
    for (std::size_t k = 0; k < nnz; ++k) y[idx[k]] += alpha * vals[k];
}

double positive_sum_sq_scalar(const double* v, std::size_t n) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double p = std::max(0.0, v[i]);
        s += p * p;
    }
    return s;
}

}  // namespace grabp::kernels::detail
