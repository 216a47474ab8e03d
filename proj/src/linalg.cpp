#include "grabp/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numeric>
#include <string>

#include "grabp/error.hpp"
#include "grabp/rng.hpp"

namespace grabp {

double compensated_sum(std::span<const double> values) {
    double sum = 0.0;
    double c = 0.0;
    for (const double v : values) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            c += (sum - t) + v;
        } else {
            c += (v - t) + sum;
        }
        sum = t;
    }
    return sum + c;
}

double norm2(std::span<const double> v) {
    return std::sqrt(kernels::active().dot(v.data(), v.data(), v.size()));
}

// ---------------------------------------------------------------------------
// RowMatrix

RowMatrix RowMatrix::dense(std::size_t m, std::size_t n, std::vector<double> values) {
    if (values.size() != m * n) {
        throw DimensionError("dense matrix: expected " + std::to_string(m * n) + " values, got " +
                             std::to_string(values.size()));
    }
    RowMatrix a;
    a.m_ = m;
    a.n_ = n;
    a.storage_ = Storage::Dense;
    a.dense_ = std::move(values);
    a.finalize();
    return a;
}

RowMatrix RowMatrix::sparse(std::size_t m, std::size_t n, std::vector<std::size_t> row_offsets,
                            std::vector<Index> col_indices, std::vector<double> values) {
    if (row_offsets.size() != m + 1 || row_offsets.front() != 0 || row_offsets.back() != values.size() ||
        col_indices.size() != values.size()) {
        throw DimensionError("sparse matrix: inconsistent CSR arrays");
    }
    for (std::size_t i = 0; i < m; ++i) {
        if (row_offsets[i] > row_offsets[i + 1]) throw DimensionError("sparse matrix: row offsets decrease");
        for (std::size_t k = row_offsets[i]; k < row_offsets[i + 1]; ++k) {
            if (col_indices[k] < 0 || static_cast<std::size_t>(col_indices[k]) >= n) {
                throw DimensionError("sparse matrix: column index out of range in row " + std::to_string(i));
            }
            if (k > row_offsets[i] && col_indices[k] <= col_indices[k - 1]) {
                throw DimensionError("sparse matrix: column indices not increasing in row " + std::to_string(i));
            }
        }
    }
    RowMatrix a;
    a.m_ = m;
    a.n_ = n;
    a.storage_ = Storage::Sparse;
    a.offsets_ = std::move(row_offsets);
    a.cols_ = std::move(col_indices);
    a.vals_ = std::move(values);
    a.finalize();
    return a;
}

RowMatrix RowMatrix::from_triplets(std::size_t m, std::size_t n, std::vector<Triplet> triplets, Storage storage) {
    for (const Triplet& t : triplets) {
        if (t.row >= m || t.col >= n) throw DimensionError("triplet index out of range");
    }
    std::stable_sort(triplets.begin(), triplets.end(), [](const Triplet& l, const Triplet& r) {
        return l.row != r.row ? l.row < r.row : l.col < r.col;
    });
    if (storage == Storage::Dense) {
        std::vector<double> values(m * n, 0.0);
        for (const Triplet& t : triplets) values[t.row * n + t.col] += t.value;
        return dense(m, n, std::move(values));
    }
    std::vector<std::size_t> offsets(m + 1, 0);
    std::vector<Index> cols;
    std::vector<double> vals;
    cols.reserve(triplets.size());
    vals.reserve(triplets.size());
    std::size_t k = 0;
    for (std::size_t i = 0; i < m; ++i) {
        while (k < triplets.size() && triplets[k].row == i) {
            const std::size_t col = triplets[k].col;
            double v = 0.0;
            while (k < triplets.size() && triplets[k].row == i && triplets[k].col == col) v += triplets[k++].value;
            if (v != 0.0) {
                cols.push_back(static_cast<Index>(col));
                vals.push_back(v);
            }
        }
        offsets[i + 1] = vals.size();
    }
    return sparse(m, n, std::move(offsets), std::move(cols), std::move(vals));
}

void RowMatrix::finalize() {
    row_norms_sq_.assign(m_, 0.0);
    std::vector<double> squares;
    for (std::size_t i = 0; i < m_; ++i) {
        squares.clear();
        if (storage_ == Storage::Dense) {
            for (std::size_t j = 0; j < n_; ++j) squares.push_back(dense_[i * n_ + j] * dense_[i * n_ + j]);
        } else {
            for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) squares.push_back(vals_[k] * vals_[k]);
        }
        row_norms_sq_[i] = compensated_sum(squares);
    }
    frob_sq_ = compensated_sum(row_norms_sq_);
}

std::size_t RowMatrix::nnz() const {
    if (storage_ == Storage::Sparse) return vals_.size();
    return static_cast<std::size_t>(std::count_if(dense_.begin(), dense_.end(), [](double v) { return v != 0.0; }));
}

double RowMatrix::at(std::size_t i, std::size_t j) const {
    if (storage_ == Storage::Dense) return dense_[i * n_ + j];
    const auto first = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i]);
    const auto last = cols_.begin() + static_cast<std::ptrdiff_t>(offsets_[i + 1]);
    const auto it = std::lower_bound(first, last, static_cast<Index>(j));
    if (it == last || *it != static_cast<Index>(j)) return 0.0;
    return vals_[static_cast<std::size_t>(it - cols_.begin())];
}

double RowMatrix::row_dot(std::size_t i, const double* x) const {
    const auto& k = kernels::active();
    if (storage_ == Storage::Dense) return k.dot(dense_.data() + i * n_, x, n_);
    const std::size_t begin = offsets_[i];
    return k.gather_dot(vals_.data() + begin, cols_.data() + begin, offsets_[i + 1] - begin, x);
}

void RowMatrix::row_axpy(std::size_t i, double alpha, double* y) const {
    const auto& k = kernels::active();
    if (storage_ == Storage::Dense) {
        k.axpy(alpha, dense_.data() + i * n_, y, n_);
        return;
    }
    const std::size_t begin = offsets_[i];
    k.scatter_axpy(alpha, vals_.data() + begin, cols_.data() + begin, offsets_[i + 1] - begin, y);
}

void RowMatrix::multiply(std::span<const double> x, std::span<double> out) const {
    if (x.size() != n_ || out.size() != m_) throw DimensionError("multiply: dimension mismatch");
    for (std::size_t i = 0; i < m_; ++i) out[i] = row_dot(i, x.data());
}

void RowMatrix::residual(std::span<const double> x, std::span<const double> b, std::span<double> out) const {
    if (x.size() != n_ || b.size() != m_ || out.size() != m_) throw DimensionError("residual: dimension mismatch");
    for (std::size_t i = 0; i < m_; ++i) out[i] = row_dot(i, x.data()) - b[i];
}

std::vector<std::size_t> RowMatrix::zero_rows() const {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < m_; ++i) {
        if (!(row_norms_sq_[i] > 0.0)) out.push_back(i);
    }
    return out;
}

RowMatrix RowMatrix::to_dense() const {
    if (storage_ == Storage::Dense) return *this;
    std::vector<double> values(m_ * n_, 0.0);
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t k = offsets_[i]; k < offsets_[i + 1]; ++k) {
            values[i * n_ + static_cast<std::size_t>(cols_[k])] = vals_[k];
        }
    }
    return dense(m_, n_, std::move(values));
}

RowMatrix RowMatrix::to_sparse() const {
    if (storage_ == Storage::Sparse) return *this;
    std::vector<std::size_t> offsets(m_ + 1, 0);
    std::vector<Index> cols;
    std::vector<double> vals;
    for (std::size_t i = 0; i < m_; ++i) {
        for (std::size_t j = 0; j < n_; ++j) {
            const double v = dense_[i * n_ + j];
            if (v != 0.0) {
                cols.push_back(static_cast<Index>(j));
                vals.push_back(v);
            }
        }
        offsets[i + 1] = vals.size();
    }
    return sparse(m_, n_, std::move(offsets), std::move(cols), std::move(vals));
}

// ---------------------------------------------------------------------------
// BlockView

struct BlockView::Cache {
    std::once_flag once;
    SpectralEstimate estimate;
};

BlockView::BlockView(const RowMatrix& parent, std::vector<std::size_t> rows)
    : parent_(&parent), rows_(std::move(rows)), cache_(std::make_shared<Cache>()) {
    std::vector<std::size_t> ordered(rows_);
    std::sort(ordered.begin(), ordered.end());
    std::vector<double> norms;
    norms.reserve(ordered.size());
    for (const std::size_t r : ordered) {
        if (r >= parent.rows()) throw DimensionError("block row index out of range");
        norms.push_back(parent.row_norm_sq(r));
    }
    frob_sq_ = compensated_sum(norms);
}

const SpectralEstimate& BlockView::spectral() const {
    std::call_once(cache_->once, [this] { cache_->estimate = spectral_norm_squared(*this); });
    return cache_->estimate;
}

// ---------------------------------------------------------------------------
// Operations

Vector positive_part(std::span<const double> v) {
    Vector out(v.size());
    std::transform(v.begin(), v.end(), out.begin(), [](double x) { return std::max(0.0, x); });
    return out;
}

Vector block_residual(const RowMatrix& a, const BlockView& block, std::span<const double> x,
                      std::span<const double> b) {
    if (&block.parent() != &a) throw DimensionError("block_residual: block belongs to another matrix");
    if (x.size() != a.cols()) throw DimensionError("block_residual: x has wrong length");
    if (b.size() != a.rows()) throw DimensionError("block_residual: b has wrong length");
    Vector out(block.size());
    const auto rows = block.rows();
    for (std::size_t j = 0; j < rows.size(); ++j) out[j] = a.row_dot(rows[j], x.data()) - b[rows[j]];
    return out;
}

Vector transpose_apply_block(const BlockView& block, std::span<const double> v) {
    if (v.size() != block.size()) throw DimensionError("transpose_apply_block: v has wrong length");
    const RowMatrix& a = block.parent();
    Vector out(a.cols(), 0.0);
    const auto rows = block.rows();
    for (std::size_t j = 0; j < rows.size(); ++j) {
        if (v[j] != 0.0) a.row_axpy(rows[j], v[j], out.data());
    }
    return out;
}

namespace {

std::uint64_t block_seed(const BlockView& block) {
    // FNV-1a over the row indices and the parent's shape.
    std::uint64_t h = 0xcbf29ce484222325ULL;
    auto mix = [&h](std::uint64_t v) {
        for (int byte = 0; byte < 8; ++byte) {
            h ^= (v >> (8 * byte)) & 0xffU;
            h *= 0x100000001b3ULL;
        }
    };
    mix(block.parent().rows());
    mix(block.parent().cols());
    for (const std::size_t r : block.rows()) mix(r);
    return h;
}

}  // namespace

SpectralEstimate spectral_norm_squared(const BlockView& block, double rel_tol) {
    const RowMatrix& a = block.parent();
    const std::size_t n = a.cols();
    const auto rows = block.rows();
    SpectralEstimate est;
    if (rows.empty()) return est;

    if (rows.size() == 1) {
        est.value = a.row_norm_sq(rows[0]);
        return est;
    }

    Rng rng(block_seed(block));
    Vector v(n);
    for (double& e : v) e = rng.normal();
    double nv = norm2(v);
    for (double& e : v) e /= nv;

    Vector y(rows.size());
    Vector z(n);
    const std::size_t cap = std::max<std::size_t>(10 * n, 500);
    double prev = -1.0;
    for (std::size_t it = 1; it <= cap; ++it) {
        for (std::size_t j = 0; j < rows.size(); ++j) y[j] = a.row_dot(rows[j], v.data());
        const double rq = kernels::active().dot(y.data(), y.data(), y.size());
        est.value = std::max(est.value, rq);
        est.iterations = it;
        if (prev >= 0.0 && std::abs(rq - prev) <= rel_tol * rq) return est;
        prev = rq;

        std::fill(z.begin(), z.end(), 0.0);
        for (std::size_t j = 0; j < rows.size(); ++j) a.row_axpy(rows[j], y[j], z.data());
        const double nz = norm2(z);
        if (nz == 0.0) return est;  // v in the null space; only possible for a zero block
        for (std::size_t i = 0; i < n; ++i) v[i] = z[i] / nz;
    }
    est.degraded = true;
    return est;
}

SpectralEstimate spectral_norm_squared(const RowMatrix& a, double rel_tol) {
    std::vector<std::size_t> all(a.rows());
    std::iota(all.begin(), all.end(), std::size_t{0});
    return spectral_norm_squared(BlockView(a, std::move(all)), rel_tol);
}

}  // namespace grabp
