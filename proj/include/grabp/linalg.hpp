#pragma once

// Row-oriented matrix storage, row-block views and the residual kernels the
// solvers share. A RowMatrix is immutable after construction.

#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "grabp/kernels.hpp"

namespace grabp {

using Vector = std::vector<double>;
using kernels::Index;

struct Triplet {
    std::size_t row;
    std::size_t col;
    double value;
};

// Neumaier-compensated sum.
double compensated_sum(std::span<const double> values);

double norm2(std::span<const double> v);

class RowMatrix {
public:
    enum class Storage { Dense, Sparse };

    RowMatrix() = default;

    // Row-major values, size m*n.
    static RowMatrix dense(std::size_t m, std::size_t n, std::vector<double> values);

    // Compressed sparse rows. Column indices inside a row must be strictly increasing.
    static RowMatrix sparse(std::size_t m, std::size_t n, std::vector<std::size_t> row_offsets,
                            std::vector<Index> col_indices, std::vector<double> values);

    // Duplicate (row, col) pairs are summed; entries that sum to zero are not stored.
    static RowMatrix from_triplets(std::size_t m, std::size_t n, std::vector<Triplet> triplets,
                                   Storage storage = Storage::Sparse);

    std::size_t rows() const { return m_; }
    std::size_t cols() const { return n_; }
    Storage storage() const { return storage_; }
    bool is_sparse() const { return storage_ == Storage::Sparse; }

    // Stored nonzeros (dense storage counts entries different from zero).
    std::size_t nnz() const;
    double density() const { return static_cast<double>(nnz()) / (static_cast<double>(m_) * static_cast<double>(n_)); }

    double at(std::size_t i, std::size_t j) const;

    double row_dot(std::size_t i, const double* x) const;
    // y += alpha * A(i, :)
    void row_axpy(std::size_t i, double alpha, double* y) const;

    double row_norm_sq(std::size_t i) const { return row_norms_sq_[i]; }
    std::span<const double> row_norms_sq() const { return row_norms_sq_; }
    double frobenius_sq() const { return frob_sq_; }

    // out = A x
    void multiply(std::span<const double> x, std::span<double> out) const;
    // out = A x - b
    void residual(std::span<const double> x, std::span<const double> b, std::span<double> out) const;

    std::vector<std::size_t> zero_rows() const;

    RowMatrix to_dense() const;
    RowMatrix to_sparse() const;

    // Dense storage accessors.
    std::span<const double> dense_values() const { return dense_; }
    // Sparse storage accessors.
    std::span<const std::size_t> row_offsets() const { return offsets_; }
    std::span<const Index> col_indices() const { return cols_; }
    std::span<const double> values() const { return vals_; }

private:
    void finalize();

    std::size_t m_ = 0;
    std::size_t n_ = 0;
    Storage storage_ = Storage::Dense;
    std::vector<double> dense_;
    std::vector<std::size_t> offsets_;
    std::vector<Index> cols_;
    std::vector<double> vals_;
    std::vector<double> row_norms_sq_;
    double frob_sq_ = 0.0;
};

struct SpectralEstimate {
    double value = 0.0;      // Rayleigh quotient, never above the true sigma_max^2
    std::size_t iterations = 0;
    bool degraded = false;   // iteration cap hit before the tolerance was met
};

// Rows I of a parent matrix. Holds a pointer to the parent, which must outlive
// the view. Copies share the lazily computed spectral estimate.
class BlockView {
public:
    BlockView(const RowMatrix& parent, std::vector<std::size_t> rows);

    const RowMatrix& parent() const { return *parent_; }
    std::span<const std::size_t> rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }
    double frob_sq() const { return frob_sq_; }

    // sigma_max^2 of the block, computed on first call and cached.
    const SpectralEstimate& spectral() const;
    double sigma_max_sq() const { return spectral().value; }

private:
    struct Cache;

    const RowMatrix* parent_;
    std::vector<std::size_t> rows_;
    double frob_sq_ = 0.0;
    std::shared_ptr<Cache> cache_;
};

Vector positive_part(std::span<const double> v);

// A(I, :) x - b(I), in block.rows() order.
Vector block_residual(const RowMatrix& a, const BlockView& block, std::span<const double> x,
                      std::span<const double> b);

// sum_j v[j] * A(I_j, :)^T
Vector transpose_apply_block(const BlockView& block, std::span<const double> v);

inline constexpr double kSpectralRelTol = 1e-10;

// Power iteration on A_I^T A_I from a start vector seeded by the block's row
// indices. Stops when successive Rayleigh quotients agree to rel_tol.
SpectralEstimate spectral_norm_squared(const BlockView& block, double rel_tol = kSpectralRelTol);

// sigma_max^2 of the whole matrix.
SpectralEstimate spectral_norm_squared(const RowMatrix& a, double rel_tol = kSpectralRelTol);

}  // namespace grabp
