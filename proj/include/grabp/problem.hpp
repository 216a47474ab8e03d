#pragma once

// Feasibility instances {x : Ax <= b}: random generation, Matrix Market
// ingestion and the LP-to-feasibility stacking transform.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "grabp/linalg.hpp"

namespace grabp {

enum class ProblemKind { RandomDense, RandomSparse, MatrixMarket, LpTransform, Custom };

const char* to_string(ProblemKind kind);

struct Provenance {
    ProblemKind kind = ProblemKind::Custom;
    std::optional<std::uint64_t> seed;
    std::string source;              // file path for file-based instances
    std::vector<std::string> notes;  // e.g. rows dropped while building
};

class FeasibilityProblem {
public:
    // Throws ZeroRowError (listing the rows) if A has a zero row and
    // DimensionError if b does not match.
    FeasibilityProblem(RowMatrix a, Vector b, Provenance provenance = {},
                       std::optional<Vector> certificate = std::nullopt);

    const RowMatrix& a() const { return *a_; }
    std::shared_ptr<const RowMatrix> shared_a() const { return a_; }
    const Vector& b() const { return b_; }
    std::size_t rows() const { return a_->rows(); }
    std::size_t cols() const { return a_->cols(); }
    const Provenance& provenance() const { return provenance_; }
    // A point known to lie in S, when one is available.
    const std::optional<Vector>& certificate() const { return certificate_; }

    // Same matrix, new right-hand side.
    FeasibilityProblem with_rhs(Vector b, std::optional<Vector> certificate) const;

private:
    FeasibilityProblem() = default;

    std::shared_ptr<const RowMatrix> a_;
    Vector b_;
    Provenance provenance_;
    std::optional<Vector> certificate_;
};

// m x n matrix of independent standard normal entries.
RowMatrix generate_dense(std::size_t m, std::size_t n, std::uint64_t seed);

// Nonzero fraction 1/(2 ln(mn)), standard normal values. Each position is
// kept independently with that probability; a row left empty receives one
// normal entry at a seeded random column.
RowMatrix generate_sparse(std::size_t m, std::size_t n, std::uint64_t seed);

double sparse_density(std::size_t m, std::size_t n);

struct SyntheticRhs {
    Vector b;
    Vector certificate;  // 0.5 (x1 + x2), feasible with slack >= 0.1 on every row
};

// b = 0.5 A x1 + 0.5 A x2 + x3 with x1, x2 ~ N(0, I_n) and x3 ~ U[0.1, 1]^m.
SyntheticRhs synth_rhs(const RowMatrix& a, std::uint64_t seed);

// Random instance with synthetic right-hand side; the matrix is drawn from
// `seed` and the right-hand side from derive_seed(seed, 1).
FeasibilityProblem random_problem(ProblemKind kind, std::size_t m, std::size_t n, std::uint64_t seed);

// Matrix Market reader: coordinate or array layout; real or integer field;
// general, symmetric or skew-symmetric symmetry. Duplicate coordinate
// entries are summed. Errors carry the offending line number.
RowMatrix read_matrix_market(std::istream& in, RowMatrix::Storage storage = RowMatrix::Storage::Sparse);
RowMatrix read_matrix_market(const std::filesystem::path& path,
                             RowMatrix::Storage storage = RowMatrix::Storage::Sparse);

// min c^T x  s.t.  A_eq x = b_eq,  l <= x <= u, with known optimum p_star.
struct LpInstance {
    RowMatrix a_eq;
    Vector b_eq;
    Vector lower;  // may hold -inf
    Vector upper;  // may hold +inf
    Vector cost;
    std::optional<double> p_star;
    std::optional<Vector> x_star;  // an optimal point, if known

    void validate() const;
};

// Plain-text LP format:
//   lp <n_rows> <n_cols> <p_star | none>
//   Aeq
//   <row> <col> <value>        (1-based, any number of lines)
//   beq
//   <n_rows values>
//   l
//   <n_cols values, "-inf" allowed>
//   u
//   <n_cols values, "inf" allowed>
//   c
//   <n_cols values>
//   xstar                       (optional section)
//   <n_cols values>
// Values may span lines; '#' starts a comment.
LpInstance read_lp_instance(std::istream& in);
LpInstance read_lp_instance(const std::filesystem::path& path);

// Stack [A_eq; -A_eq; I; -I; c^T] x <= [b_eq; -b_eq; u; -l; p_star].
// Rows for infinite bounds and rows that would be zero are left out and
// recorded in provenance().notes. Throws std::invalid_argument without p_star.
FeasibilityProblem lp_to_feasibility(const LpInstance& lp);

}  // namespace grabp
