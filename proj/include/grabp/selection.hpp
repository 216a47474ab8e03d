#pragma once

// Row partition and greedy block selection: the partition is fixed once per
// run, then each iteration computes the threshold epsilon_k, the admitted set
// U_k and a sampling distribution supported on U_k.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <vector>

#include "grabp/linalg.hpp"
#include "grabp/rng.hpp"

namespace grabp {

class Partition {
public:
    // Blocks must be nonempty, disjoint and cover 0..m-1.
    Partition(std::shared_ptr<const RowMatrix> a, std::vector<std::vector<std::size_t>> blocks);

    std::size_t size() const { return views_.size(); }
    const BlockView& block(std::size_t i) const { return views_[i]; }
    std::span<const BlockView> blocks() const { return views_; }
    const RowMatrix& matrix() const { return *a_; }

private:
    std::shared_ptr<const RowMatrix> a_;
    std::vector<BlockView> views_;
};

// max_i sigma_max^2(A_I) / ||A_I||_F^2 over the blocks; 1 for singletons.
double zeta(const Partition& partition);

// Block i (0-based) receives perm[floor(i m / t) .. floor((i+1) m / t)) of a
// uniform permutation drawn by Fisher-Yates; indices in a block are sorted.
std::vector<std::vector<std::size_t>> random_partition_indices(std::size_t m, std::size_t t, std::uint64_t seed);

Partition random_partition(std::shared_ptr<const RowMatrix> a, std::size_t t, std::uint64_t seed);

// All rows as singleton blocks, in row order.
Partition singleton_partition(std::shared_ptr<const RowMatrix> a);

enum class Criterion {
    PNorm,         // p_i proportional to ||r_I||_p^p
    TwoNormPower,  // p_i proportional to ||r_I||_2^mu
};

struct SelectionConfig {
    double theta = 0.5;
    Criterion criterion = Criterion::PNorm;
    double exponent = 2.0;  // p or mu
};

// Throws std::domain_error when total_residual_sq == 0 (the iterate is feasible).
double compute_epsilon(std::span<const double> block_scores, double total_residual_sq, double frob_sq_total,
                       double theta = 0.5);

// { i : block_scores[i] >= epsilon * total }, plus the argmax block (smallest
// index on ties), which the threshold always admits in exact arithmetic.
std::vector<std::size_t> greedy_index_set(std::span<const double> block_scores, double epsilon,
                                          double total_residual_sq);

// Unnormalized weight of one admitted block from its positive residual.
double block_weight(std::span<const double> positive_residual, const SelectionConfig& config);

// Distribution over t blocks: weights of admitted blocks normalized to one,
// zero elsewhere. `admitted_residuals[k]` is the positive residual of block
// admitted[k]. Throws InternalError if every admitted weight is zero.
std::vector<double> block_probabilities(std::size_t t, std::span<const std::size_t> admitted,
                                        std::span<const std::vector<double>> admitted_residuals,
                                        const SelectionConfig& config);

// Inverse-CDF draw; consumes exactly one uniform from rng.
std::size_t sample_block(std::span<const double> probabilities, Rng& rng);

}  // namespace grabp
