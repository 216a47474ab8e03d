#pragma once

// Iterative kernels for Ax <= b and the run loop that drives them.
//
// Every step leaves SolverState::residual equal to A x - b for the new
// iterate (one full sweep per step), which is what the greedy threshold and
// the RES stopping rule both need.

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "grabp/linalg.hpp"
#include "grabp/problem.hpp"
#include "grabp/rng.hpp"
#include "grabp/selection.hpp"

namespace grabp {

// ---------------------------------------------------------------------------
// Stepsizes and stopping rules

struct StepsizePolicy {
    enum class Kind { Constant, Adaptive };

    Kind kind = Kind::Adaptive;
    double alpha = 1.0;  // constant kind; 0 < alpha * zeta < 2
    double w = 1.0;      // adaptive kind; 0 < w < 2
    double zeta = 1.0;

    static StepsizePolicy constant(double alpha, double zeta);
    // alpha = scale / zeta, so scale must lie in (0, 2).
    static StepsizePolicy constant_scaled(double scale, double zeta);
    static StepsizePolicy adaptive(double w, double zeta = 1.0);

    // Throws std::invalid_argument when out of range.
    void validate() const;
};

struct StoppingCriterion {
    std::optional<double> res_tol = 1e-8;
    std::optional<double> phi;                       // gap-ratio tolerance
    std::optional<std::size_t> max_iters;
    std::optional<double> wall_clock_seconds = 50.0;

    void validate() const;
};

enum class StopReason { ResTolerance, Feasible, GapRatio, MaxIterations, WallClock };

const char* to_string(StopReason reason);

// ---------------------------------------------------------------------------
// State

struct HistoryPoint {
    std::size_t iteration = 0;
    double res = 0.0;
    std::optional<double> distance;
};

// What the last GRABP step did; used by the analysis checks.
struct StepInfo {
    std::size_t block = 0;
    double alpha = 0.0;              // alpha_k
    double block_residual_sq = 0.0;  // ||(A_I x - b_I)_+||^2 before the step
    double block_frob_sq = 0.0;      // ||A_I||_F^2
    double epsilon = 0.0;
    std::size_t admitted = 0;        // |U_k|
};

struct SolverState {
    SolverState(const FeasibilityProblem& problem, Vector x0, std::uint64_t seed);

    Vector x;
    std::size_t k = 0;
    Vector residual;                 // A x - b
    double residual_pos_sq = 0.0;    // ||(A x - b)_+||^2
    Rng rng;
    StepInfo last_step;
    std::vector<std::size_t> sample_pool;  // SKM without-replacement scratch

    void refresh(const FeasibilityProblem& problem);
};

// ---------------------------------------------------------------------------
// Measures

// ||(Ax - b)_+|| / ||b||, or the absolute ||(Ax - b)_+|| when b = 0.
double res(const FeasibilityProblem& problem, std::span<const double> x);
bool res_is_absolute(const FeasibilityProblem& problem);

// max(Ax - b) / max(Ax0 - b); nullopt when max(Ax0 - b) <= 0 (nothing to reduce).
std::optional<double> gap_ratio(const FeasibilityProblem& problem, std::span<const double> x,
                                std::span<const double> x0);

// ---------------------------------------------------------------------------
// Steps

// Randomized projection: row i drawn with probability ||A_i||^2 / ||A||_F^2,
// then projection onto {A_i x <= b_i}.
void rp_step(const FeasibilityProblem& problem, SolverState& state);

// Sampling Kaczmarz-Motzkin: beta rows uniformly without replacement, the one
// with the largest violation / ||A_i|| is relaxed with factor delta.
void skm_step(const FeasibilityProblem& problem, SolverState& state, std::size_t beta, double delta);

// One greedy randomized average block projection step. Requires a nonzero
// positive residual.
void grabp_step(const FeasibilityProblem& problem, const Partition& partition, const SelectionConfig& selection,
                const StepsizePolicy& policy, SolverState& state);

struct GskmParams {
    std::size_t beta = 1;
    double delta = 1.0;
    double momentum = 0.0;
};

struct PaskmParams {
    std::size_t beta = 1;
    double delta = 1.0;
    double gamma = 0.0;
    double omega = 0.0;
};

// Not implemented: both throw UnimplementedError.
void gskm_step(const FeasibilityProblem& problem, SolverState& state, const GskmParams& params);
void paskm_step(const FeasibilityProblem& problem, SolverState& state, const PaskmParams& params);

// ---------------------------------------------------------------------------
// Run loop

struct RpConfig {};

struct SkmConfig {
    std::size_t beta = 1;
    double delta = 1.0;
};

struct GrabpConfig {
    StepsizePolicy::Kind kind = StepsizePolicy::Kind::Adaptive;
    double alpha_scale = 1.0;  // constant kind: alpha = alpha_scale / zeta
    double w = 1.0;            // adaptive kind
    std::size_t t = 10;
    SelectionConfig selection;
};

using MethodConfig = std::variant<RpConfig, SkmConfig, GrabpConfig, GskmParams, PaskmParams>;

std::string method_name(const MethodConfig& method);

struct RunOptions {
    std::uint64_t seed = 0;
    bool record_history = false;
    std::optional<Vector> x0;  // zero vector when absent
    // Optional extra history column, e.g. distance to S from the projection oracle.
    std::function<double(std::span<const double>)> distance_probe;
};

struct RunResult {
    std::size_t iterations = 0;
    double seconds = 0.0;
    double terminal_res = 0.0;
    bool res_absolute = false;
    StopReason stop = StopReason::MaxIterations;
    bool forced() const { return stop == StopReason::WallClock; }
    std::uint64_t seed = 0;
    std::size_t t = 0;       // GRABP block count, 0 otherwise
    double zeta = 0.0;       // GRABP only
    std::vector<HistoryPoint> history;
    Vector x;
};

// Seeds: the partition uses derive_seed(seed, 3) and step sampling
// derive_seed(seed, 2). Stopping rules are checked before every step in the
// order RES, exact feasibility, gap ratio, iteration cap, wall clock. Methods
// without an implementation throw UnimplementedError before any step.
RunResult run(const FeasibilityProblem& problem, const MethodConfig& method, const StoppingCriterion& stopping,
              const RunOptions& options);

}  // namespace grabp
