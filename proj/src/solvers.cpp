#include "grabp/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>

#include "grabp/error.hpp"

namespace grabp {

// ---------------------------------------------------------------------------
// Policies

StepsizePolicy StepsizePolicy::constant(double alpha, double zeta) {
    StepsizePolicy p;
    p.kind = Kind::Constant;
    p.alpha = alpha;
    p.zeta = zeta;
    p.validate();
    return p;
}

StepsizePolicy StepsizePolicy::constant_scaled(double scale, double zeta) {
    if (!(zeta > 0.0)) throw std::invalid_argument("stepsize: zeta must be positive");
    return constant(scale / zeta, zeta);
}

StepsizePolicy StepsizePolicy::adaptive(double w, double zeta) {
    StepsizePolicy p;
    p.kind = Kind::Adaptive;
    p.w = w;
    p.zeta = zeta;
    p.validate();
    return p;
}

void StepsizePolicy::validate() const {
    if (!(zeta > 0.0 && zeta <= 1.0 + 1e-12)) throw std::invalid_argument("stepsize: zeta must lie in (0, 1]");
    if (kind == Kind::Constant) {
        const double az = alpha * zeta;
        if (!(alpha > 0.0 && az < 2.0)) {
            throw std::invalid_argument("stepsize: constant alpha must satisfy 0 < alpha*zeta < 2 (got alpha*zeta=" +
                                        std::to_string(az) + ")");
        }
    } else if (!(w > 0.0 && w < 2.0)) {
        throw std::invalid_argument("stepsize: w must lie in (0, 2)");
    }
}

void StoppingCriterion::validate() const {
    if (!res_tol && !phi && !max_iters && !wall_clock_seconds) {
        throw std::invalid_argument("stopping: at least one stopping rule must be set");
    }
    if (res_tol && !(*res_tol >= 0.0)) throw std::invalid_argument("stopping: res_tol must be non-negative");
    if (phi && !(*phi < 1.0)) throw std::invalid_argument("stopping: phi must be below 1");
    if (wall_clock_seconds && !(*wall_clock_seconds > 0.0)) {
        throw std::invalid_argument("stopping: wall clock cap must be positive");
    }
}

const char* to_string(StopReason reason) {
    switch (reason) {
        case StopReason::ResTolerance: return "res_tol";
        case StopReason::Feasible: return "feasible";
        case StopReason::GapRatio: return "gap_ratio";
        case StopReason::MaxIterations: return "max_iters";
        case StopReason::WallClock: return "forced_stop";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------
// State

SolverState::SolverState(const FeasibilityProblem& problem, Vector x0, std::uint64_t seed)
    : x(std::move(x0)), residual(problem.rows()), rng(seed) {
    if (x.size() != problem.cols()) throw DimensionError("solver state: x0 has wrong length");
    refresh(problem);
}

void SolverState::refresh(const FeasibilityProblem& problem) {
    problem.a().residual(x, problem.b(), residual);
    residual_pos_sq = kernels::active().positive_sum_sq(residual.data(), residual.size());
}

// ---------------------------------------------------------------------------
// Measures

bool res_is_absolute(const FeasibilityProblem& problem) {
    return norm2(problem.b()) == 0.0;
}

double res(const FeasibilityProblem& problem, std::span<const double> x) {
    Vector r(problem.rows());
    problem.a().residual(x, problem.b(), r);
    const double num = std::sqrt(kernels::active().positive_sum_sq(r.data(), r.size()));
    const double den = norm2(problem.b());
    return den > 0.0 ? num / den : num;
}

std::optional<double> gap_ratio(const FeasibilityProblem& problem, std::span<const double> x,
                                std::span<const double> x0) {
    Vector r(problem.rows());
    problem.a().residual(x0, problem.b(), r);
    const double den = *std::max_element(r.begin(), r.end());
    if (!(den > 0.0)) return std::nullopt;
    problem.a().residual(x, problem.b(), r);
    return *std::max_element(r.begin(), r.end()) / den;
}

// ---------------------------------------------------------------------------
// Steps

namespace {

void project_row(const FeasibilityProblem& problem, SolverState& state, std::size_t i, double relax) {
    const double viol = state.residual[i];
    if (viol > 0.0) {
        problem.a().row_axpy(i, -relax * viol / problem.a().row_norm_sq(i), state.x.data());
        state.refresh(problem);
    }
}

}  // namespace

void rp_step(const FeasibilityProblem& problem, SolverState& state) {
    const RowMatrix& a = problem.a();
    const double target = state.rng.uniform() * a.frobenius_sq();
    const auto norms = a.row_norms_sq();
    std::size_t i = 0;
    double cumulative = 0.0;
    for (; i + 1 < norms.size(); ++i) {
        cumulative += norms[i];
        if (target < cumulative) break;
    }
    project_row(problem, state, i, 1.0);
    ++state.k;
}

void skm_step(const FeasibilityProblem& problem, SolverState& state, std::size_t beta, double delta) {
    const std::size_t m = problem.rows();
    if (beta < 1 || beta > m) throw std::invalid_argument("skm_step: need 1 <= beta <= m");
    if (!(delta > 0.0 && delta < 2.0)) throw std::invalid_argument("skm_step: delta must lie in (0, 2)");
    if (state.sample_pool.size() != m) {
        state.sample_pool.resize(m);
        std::iota(state.sample_pool.begin(), state.sample_pool.end(), std::size_t{0});
    }
    auto& pool = state.sample_pool;
    std::size_t best = m;
    double best_score = 0.0;
    for (std::size_t j = 0; j < beta; ++j) {
        std::swap(pool[j], pool[j + state.rng.uniform_index(m - j)]);
        const std::size_t i = pool[j];
        const double viol = state.residual[i];
        if (viol <= 0.0) continue;
        const double score = viol / std::sqrt(problem.a().row_norm_sq(i));
        if (score > best_score) {
            best_score = score;
            best = i;
        }
    }
    if (best < m) project_row(problem, state, best, delta);
    ++state.k;
}

void grabp_step(const FeasibilityProblem& problem, const Partition& partition, const SelectionConfig& selection,
                const StepsizePolicy& policy, SolverState& state) {
    if (&partition.matrix() != &problem.a()) throw std::invalid_argument("grabp_step: partition built for another matrix");
    if (!(state.residual_pos_sq > 0.0)) throw InternalError("grabp_step: iterate is already feasible");
    const auto& kern = kernels::active();
    const std::size_t t = partition.size();

    // Positive block residuals and scores ||r_I||^2 / ||A_I||_F^2.
    std::vector<std::vector<double>> block_pos(t);
    std::vector<double> scores(t);
    for (std::size_t i = 0; i < t; ++i) {
        const BlockView& blk = partition.block(i);
        auto& r = block_pos[i];
        r.resize(blk.size());
        const auto rows = blk.rows();
        for (std::size_t j = 0; j < rows.size(); ++j) r[j] = std::max(0.0, state.residual[rows[j]]);
        scores[i] = kern.dot(r.data(), r.data(), r.size()) / blk.frob_sq();
    }

    const double total = state.residual_pos_sq;
    const double eps = compute_epsilon(scores, total, problem.a().frobenius_sq(), selection.theta);
    const std::vector<std::size_t> admitted = greedy_index_set(scores, eps, total);
    std::vector<std::vector<double>> admitted_res;
    admitted_res.reserve(admitted.size());
    for (const std::size_t i : admitted) admitted_res.push_back(block_pos[i]);
    const std::vector<double> probs = block_probabilities(t, admitted, admitted_res, selection);
    const std::size_t ik = sample_block(probs, state.rng);

    const BlockView& blk = partition.block(ik);
    const std::vector<double>& r = block_pos[ik];
    const double r_sq = kern.dot(r.data(), r.data(), r.size());
    if (!(r_sq > 0.0)) throw InternalError("grabp_step: selected block has zero positive residual");
    const Vector direction = transpose_apply_block(blk, r);

    double alpha = policy.alpha;
    if (policy.kind == StepsizePolicy::Kind::Adaptive) {
        const double d_sq = kern.dot(direction.data(), direction.data(), direction.size());
        if (!(d_sq > 0.0)) throw InternalError("grabp_step: A_I^T r_I vanished for a nonzero block residual");
        alpha = policy.w * r_sq * blk.frob_sq() / d_sq;
    }
    kern.axpy(-alpha / blk.frob_sq(), direction.data(), state.x.data(), direction.size());

    state.last_step = StepInfo{ik, alpha, r_sq, blk.frob_sq(), eps, admitted.size()};
    state.refresh(problem);
    ++state.k;
}

void gskm_step(const FeasibilityProblem&, SolverState&, const GskmParams&) {
    throw UnimplementedError("gskm_step: the generalized SKM update is not implemented");
}

void paskm_step(const FeasibilityProblem&, SolverState&, const PaskmParams&) {
    throw UnimplementedError("paskm_step: the accelerated SKM update is not implemented");
}

// ---------------------------------------------------------------------------
// Run loop

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

}  // namespace

std::string method_name(const MethodConfig& method) {
    return std::visit(overloaded{
                          [](const RpConfig&) { return std::string("rp"); },
                          [](const SkmConfig&) { return std::string("skm"); },
                          [](const GrabpConfig& g) {
                              return std::string(g.kind == StepsizePolicy::Kind::Constant ? "grabp-c" : "grabp-a");
                          },
                          [](const GskmParams&) { return std::string("gskm"); },
                          [](const PaskmParams&) { return std::string("paskm"); },
                      },
                      method);
}

RunResult run(const FeasibilityProblem& problem, const MethodConfig& method, const StoppingCriterion& stopping,
              const RunOptions& options) {
    stopping.validate();
    using Clock = std::chrono::steady_clock;

    RunResult out;
    out.seed = options.seed;
    out.res_absolute = res_is_absolute(problem);
    const double b_norm = out.res_absolute ? 1.0 : norm2(problem.b());

    Vector x0 = options.x0.value_or(Vector(problem.cols(), 0.0));
    SolverState state(problem, x0, derive_seed(options.seed, 2));

    // Partitioning and zeta count toward the solve time.
    std::optional<Partition> partition;
    StepsizePolicy policy;
    const auto start = Clock::now();
    if (const auto* g = std::get_if<GrabpConfig>(&method)) {
        partition.emplace(random_partition(problem.shared_a(), g->t, derive_seed(options.seed, 3)));
        out.t = g->t;
        if (g->kind == StepsizePolicy::Kind::Constant) {
            out.zeta = zeta(*partition);
            policy = StepsizePolicy::constant_scaled(g->alpha_scale, out.zeta);
        } else {
            policy = StepsizePolicy::adaptive(g->w);
        }
    } else if (const auto* s = std::get_if<SkmConfig>(&method)) {
        if (s->beta < 1 || s->beta > problem.rows()) throw std::invalid_argument("skm: need 1 <= beta <= m");
    } else if (!std::holds_alternative<RpConfig>(method)) {
        throw UnimplementedError("run: " + method_name(method) + " is not implemented");
    }

    double gap_den = 0.0;
    if (stopping.phi) {
        gap_den = *std::max_element(state.residual.begin(), state.residual.end());
    }

    auto current_res = [&] { return std::sqrt(state.residual_pos_sq) / b_norm; };
    auto record = [&] {
        if (!options.record_history) return;
        HistoryPoint h{state.k, current_res(), std::nullopt};
        if (options.distance_probe) h.distance = options.distance_probe(state.x);
        out.history.push_back(h);
    };

    record();
    for (;;) {
        const double r = current_res();
        if (stopping.res_tol && r <= *stopping.res_tol) {
            out.stop = StopReason::ResTolerance;
            break;
        }
        if (state.residual_pos_sq == 0.0) {
            out.stop = StopReason::Feasible;
            break;
        }
        if (stopping.phi) {
            if (!(gap_den > 0.0)) {
                out.stop = StopReason::GapRatio;
                break;
            }
            const double top = *std::max_element(state.residual.begin(), state.residual.end());
            if (top / gap_den <= *stopping.phi) {
                out.stop = StopReason::GapRatio;
                break;
            }
        }
        if (stopping.max_iters && state.k >= *stopping.max_iters) {
            out.stop = StopReason::MaxIterations;
            break;
        }
        if (stopping.wall_clock_seconds &&
            std::chrono::duration<double>(Clock::now() - start).count() > *stopping.wall_clock_seconds) {
            out.stop = StopReason::WallClock;
            break;
        }

        std::visit(overloaded{
                       [&](const RpConfig&) { rp_step(problem, state); },
                       [&](const SkmConfig& s) { skm_step(problem, state, s.beta, s.delta); },
                       [&](const GrabpConfig& g) { grabp_step(problem, *partition, g.selection, policy, state); },
                       [&](const GskmParams& p) { gskm_step(problem, state, p); },
                       [&](const PaskmParams& p) { paskm_step(problem, state, p); },
                   },
                   method);
        record();
    }
    out.seconds = std::chrono::duration<double>(Clock::now() - start).count();
    out.iterations = state.k;
    out.terminal_res = current_res();
    out.x = std::move(state.x);
    return out;
}

}  // namespace grabp
