#pragma once

// Ground-truth machinery for checking the solvers on small instances: the
// Euclidean projection onto S, Hoffman-constant estimates and the linear
// convergence factors predicted for GRABP.
//
// A note on direction: hoffman_lower_bound() returns L_hat <= L. Plugging
// L_hat into the factors below gives a number SMALLER than the factor with
// the true L, so an observed rate may legitimately sit above it. Checks that
// compare the two must carry explicit slack.

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>

#include "grabp/linalg.hpp"
#include "grabp/problem.hpp"
#include "grabp/selection.hpp"
#include "grabp/solvers.hpp"

namespace grabp {

struct ProjectionError : std::runtime_error {
    ProjectionError(Vector last_in, double gap_in, const std::string& what)
        : std::runtime_error(what), last(std::move(last_in)), gap(gap_in) {}
    Vector last;
    double gap;  // movement in the final sweep
};

inline constexpr std::size_t kMaxDykstraSweeps = 100000;

// Dykstra's method over the m halfspaces (Hildreth form: one multiplier per
// row). Sweeps until one full sweep moves the iterate by less than tol and
// ||(Ax - b)_+|| < tol. Every few sweeps the rows with positive multipliers
// are tried as the active set: the projection onto {A_J y = b_J} is returned
// directly when it passes the KKT check to tol. The sweeps alone can stall
// for a very long time with a visible violation left; a stall or the sweep
// cap falls back to an exact least-distance (NNLS) solve. ProjectionError
// means both failed, e.g. because S is empty.
Vector project_onto_S(const FeasibilityProblem& problem, std::span<const double> x, double tol = 1e-10,
                      std::size_t max_sweeps = kMaxDykstraSweeps);

double distance_to_S(const FeasibilityProblem& problem, std::span<const double> x, double tol = 1e-10);

// max over sampled infeasible x of dist(x, S) / ||(Ax - b)_+||. Samples are
// c + r g / sqrt(n) with g ~ N(0, I), r cycling through {0.1, 1, 10} * ||c||
// (||c|| replaced by 1 when zero), where c is the problem's certificate or
// the projection of the origin. Sample i does not depend on sample_count.
double hoffman_lower_bound(const FeasibilityProblem& problem, std::size_t sample_count, std::uint64_t seed,
                           double tol = 1e-10);

// max over row subsets J with A_J of full row rank of 1 / sigma_min(A_J).
// Enumerates every subset of at most n rows; limited to m <= 12, n <= 4.
double hoffman_upper_bound_bruteforce(const RowMatrix& a);

// Constant:  1 - (2 alpha - alpha^2 zeta) / (L^2 ||A||_F^2)
// Adaptive:  1 - (2 w - w^2) / (zeta L^2 ||A||_F^2)
// clamped to [0, 1).
double theoretical_factor(const StepsizePolicy& policy, double zeta, double hoffman, double frob_sq);

// exp of the least-squares slope of ln(d_k) against k. Entries after the
// first non-positive one are dropped; at least 3 must remain.
double empirical_factor(std::span<const double> dist_sq);

struct ConvergenceAnalysis {
    double zeta = 0.0;
    double hoffman_lower = 0.0;
    double theoretical_factor = 0.0;
    double empirical_factor = 0.0;
    double frob_sq = 0.0;
};

ConvergenceAnalysis analyze_convergence(const FeasibilityProblem& problem, const Partition& partition,
                                        const StepsizePolicy& policy, double hoffman_lower,
                                        std::span<const double> dist_sq_history);

}  // namespace grabp
