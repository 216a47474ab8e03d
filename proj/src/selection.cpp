#include "grabp/selection.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "grabp/error.hpp"

namespace grabp {

Partition::Partition(std::shared_ptr<const RowMatrix> a, std::vector<std::vector<std::size_t>> blocks)
    : a_(std::move(a)) {
    const std::size_t m = a_->rows();
    std::vector<char> seen(m, 0);
    std::size_t covered = 0;
    views_.reserve(blocks.size());
    for (auto& rows : blocks) {
        if (rows.empty()) throw std::invalid_argument("partition: empty block");
        for (const std::size_t r : rows) {
            if (r >= m) throw std::invalid_argument("partition: row index out of range");
            if (seen[r]) throw std::invalid_argument("partition: row " + std::to_string(r) + " in two blocks");
            seen[r] = 1;
            ++covered;
        }
        views_.emplace_back(*a_, std::move(rows));
    }
    if (covered != m) throw std::invalid_argument("partition: blocks do not cover every row");
}

double zeta(const Partition& partition) {
    double z = 0.0;
    for (const BlockView& b : partition.blocks()) {
        const double ratio = b.size() == 1 ? 1.0 : b.sigma_max_sq() / b.frob_sq();
        z = std::max(z, ratio);
    }
    return z;
}

std::vector<std::vector<std::size_t>> random_partition_indices(std::size_t m, std::size_t t, std::uint64_t seed) {
    if (t < 1 || t > m) {
        throw std::invalid_argument("random_partition: need 1 <= t <= m (t=" + std::to_string(t) +
                                    ", m=" + std::to_string(m) + ")");
    }
    std::vector<std::size_t> perm(m);
    std::iota(perm.begin(), perm.end(), std::size_t{0});
    Rng rng(seed);
    for (std::size_t i = m - 1; i > 0; --i) std::swap(perm[i], perm[rng.uniform_index(i + 1)]);

    std::vector<std::vector<std::size_t>> blocks(t);
    for (std::size_t i = 0; i < t; ++i) {
        const std::size_t lo = i * m / t;
        const std::size_t hi = (i + 1) * m / t;
        blocks[i].assign(perm.begin() + static_cast<std::ptrdiff_t>(lo), perm.begin() + static_cast<std::ptrdiff_t>(hi));
        std::sort(blocks[i].begin(), blocks[i].end());
    }
    return blocks;
}

Partition random_partition(std::shared_ptr<const RowMatrix> a, std::size_t t, std::uint64_t seed) {
    auto blocks = random_partition_indices(a->rows(), t, seed);
    return Partition(std::move(a), std::move(blocks));
}

Partition singleton_partition(std::shared_ptr<const RowMatrix> a) {
    std::vector<std::vector<std::size_t>> blocks(a->rows());
    for (std::size_t i = 0; i < blocks.size(); ++i) blocks[i] = {i};
    return Partition(std::move(a), std::move(blocks));
}

double compute_epsilon(std::span<const double> block_scores, double total_residual_sq, double frob_sq_total,
                       double theta) {
    if (!(total_residual_sq > 0.0)) throw std::domain_error("compute_epsilon: iterate is already feasible");
    if (block_scores.empty()) throw std::invalid_argument("compute_epsilon: no blocks");
    const double max_score = *std::max_element(block_scores.begin(), block_scores.end());
    return theta * max_score / total_residual_sq + (1.0 - theta) / frob_sq_total;
}

std::vector<std::size_t> greedy_index_set(std::span<const double> block_scores, double epsilon,
                                          double total_residual_sq) {
    std::vector<std::size_t> admitted;
    if (block_scores.empty()) return admitted;
    const auto argmax = static_cast<std::size_t>(
        std::max_element(block_scores.begin(), block_scores.end()) - block_scores.begin());
    const double threshold = epsilon * total_residual_sq;
    for (std::size_t i = 0; i < block_scores.size(); ++i) {
        if (i == argmax || block_scores[i] >= threshold) admitted.push_back(i);
    }
    return admitted;
}

double block_weight(std::span<const double> positive_residual, const SelectionConfig& config) {
    if (config.criterion == Criterion::PNorm) {
        double s = 0.0;
        if (config.exponent == 2.0) {
            s = kernels::active().positive_sum_sq(positive_residual.data(), positive_residual.size());
        } else {
            for (const double r : positive_residual) s += std::pow(std::abs(r), config.exponent);
        }
        return s;
    }
    const double nrm = std::sqrt(kernels::active().positive_sum_sq(positive_residual.data(), positive_residual.size()));
    return config.exponent == 2.0 ? nrm * nrm : std::pow(nrm, config.exponent);
}

std::vector<double> block_probabilities(std::size_t t, std::span<const std::size_t> admitted,
                                        std::span<const std::vector<double>> admitted_residuals,
                                        const SelectionConfig& config) {
    if (admitted.size() != admitted_residuals.size()) {
        throw std::invalid_argument("block_probabilities: one residual per admitted block required");
    }
    std::vector<double> p(t, 0.0);
    double total = 0.0;
    for (std::size_t k = 0; k < admitted.size(); ++k) {
        if (admitted[k] >= t) throw std::invalid_argument("block_probabilities: admitted index out of range");
        const double w = block_weight(admitted_residuals[k], config);
        p[admitted[k]] = w;
        total += w;
    }
    if (!(total > 0.0)) throw InternalError("block_probabilities: every admitted block has zero residual");
    for (const std::size_t i : admitted) p[i] /= total;
    return p;
}

std::size_t sample_block(std::span<const double> probabilities, Rng& rng) {
    const double u = rng.uniform();
    double cumulative = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < probabilities.size(); ++i) {
        if (probabilities[i] <= 0.0) continue;
        cumulative += probabilities[i];
        last_positive = i;
        if (u < cumulative) return i;
    }
    // Rounding left the cumulative sum just below one.
    return last_positive;
}

}  // namespace grabp
