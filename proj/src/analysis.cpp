#include "grabp/analysis.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>

#include "grabp/error.hpp"
#include "grabp/kernels.hpp"
#include "grabp/rng.hpp"

namespace grabp {

namespace {

constexpr std::size_t kPolishEvery = 16;

// Treats the rows with positive multipliers as the active set, projects x
// onto {A_J y = b_J} and accepts the point only if it satisfies the KKT
// conditions: multipliers non-negative and every row feasible to tol.
std::optional<Vector> polish(const RowMatrix& a, const Vector& b, std::span<const double> x, const Vector& lambda,
                             double tol) {
    std::vector<std::size_t> active;
    for (std::size_t i = 0; i < lambda.size(); ++i)
        if (lambda[i] > 0.0) active.push_back(i);
    if (active.empty()) return std::nullopt;
    const auto k = static_cast<Eigen::Index>(active.size());
    const auto n = static_cast<Eigen::Index>(a.cols());
    Eigen::MatrixXd aj = Eigen::MatrixXd::Zero(k, n);
    Eigen::VectorXd rhs(k);
    const Eigen::Map<const Eigen::VectorXd> xv(x.data(), n);
    for (Eigen::Index r = 0; r < k; ++r) {
        const std::size_t i = active[static_cast<std::size_t>(r)];
        for (Eigen::Index j = 0; j < n; ++j) aj(r, j) = a.at(i, static_cast<std::size_t>(j));
        rhs(r) = aj.row(r).dot(xv) - b[i];
    }
    const Eigen::VectorXd mu = (aj * aj.transpose()).colPivHouseholderQr().solve(rhs);
    if (!mu.allFinite() || mu.minCoeff() < -tol * std::max(1.0, mu.cwiseAbs().maxCoeff())) return std::nullopt;
    const Eigen::VectorXd yv = xv - aj.transpose() * mu;
    Vector y(yv.data(), yv.data() + n);
    Vector r(a.rows());
    a.residual(y, b, r);
    for (Eigen::Index q = 0; q < k; ++q) {
        if (std::abs(r[active[static_cast<std::size_t>(q)]]) > tol) return std::nullopt;
    }
    if (*std::max_element(r.begin(), r.end()) > tol) return std::nullopt;
    return y;
}

// Lawson-Hanson active-set NNLS: min ||E u - f|| subject to u >= 0.
Eigen::VectorXd nnls(const Eigen::MatrixXd& e, const Eigen::VectorXd& f) {
    const Eigen::Index m = e.cols();
    Eigen::VectorXd u = Eigen::VectorXd::Zero(m);
    std::vector<bool> passive(static_cast<std::size_t>(m), false);
    const double wtol = 1e-13 * std::max(1.0, e.cwiseAbs().maxCoeff()) * std::max(1.0, f.norm());
    auto solve_passive = [&](std::vector<Eigen::Index>& idx) {
        idx.clear();
        for (Eigen::Index j = 0; j < m; ++j)
            if (passive[static_cast<std::size_t>(j)]) idx.push_back(j);
        Eigen::MatrixXd ep(e.rows(), static_cast<Eigen::Index>(idx.size()));
        for (std::size_t k = 0; k < idx.size(); ++k) ep.col(static_cast<Eigen::Index>(k)) = e.col(idx[k]);
        return Eigen::VectorXd(ep.colPivHouseholderQr().solve(f));
    };
    std::vector<Eigen::Index> idx;
    for (Eigen::Index outer = 0; outer < 3 * m + 10; ++outer) {
        const Eigen::VectorXd w = e.transpose() * (f - e * u);
        Eigen::Index best = -1;
        for (Eigen::Index j = 0; j < m; ++j) {
            if (!passive[static_cast<std::size_t>(j)] && w(j) > wtol && (best < 0 || w(j) > w(best))) best = j;
        }
        if (best < 0) return u;
        passive[static_cast<std::size_t>(best)] = true;
        for (Eigen::Index inner = 0; inner <= m; ++inner) {
            const Eigen::VectorXd z = solve_passive(idx);
            double step = 1.0;
            bool clipped = false;
            for (std::size_t k = 0; k < idx.size(); ++k) {
                const Eigen::Index j = idx[k];
                if (z(static_cast<Eigen::Index>(k)) <= 0.0) {
                    const double denom = u(j) - z(static_cast<Eigen::Index>(k));
                    const double a = denom > 0.0 ? u(j) / denom : 0.0;
                    if (!clipped || a < step) step = a;
                    clipped = true;
                }
            }
            Eigen::VectorXd next = Eigen::VectorXd::Zero(m);
            for (std::size_t k = 0; k < idx.size(); ++k) next(idx[k]) = z(static_cast<Eigen::Index>(k));
            if (!clipped) {
                u = next;
                break;
            }
            u += step * (next - u);
            for (const Eigen::Index j : idx) {
                if (u(j) <= 1e-15 * std::max(1.0, u.cwiseAbs().maxCoeff())) {
                    passive[static_cast<std::size_t>(j)] = false;
                    u(j) = 0.0;
                }
            }
        }
    }
    throw std::runtime_error("nnls: iteration limit reached");
}

// Exact projection as a least-distance program: with z = y - x the problem is
// min ||z|| s.t. A z <= b - A x, which Lawson and Hanson reduce to one NNLS
// solve on E = [-A^T; (A x - b)^T], f = e_{n+1}.
std::optional<Vector> project_ldp(const RowMatrix& a, const Vector& b, std::span<const double> x, double tol) {
    const auto m = static_cast<Eigen::Index>(a.rows());
    const auto n = static_cast<Eigen::Index>(a.cols());
    Vector r(a.rows());
    a.residual(x, b, r);
    Eigen::MatrixXd e(n + 1, m);
    for (Eigen::Index i = 0; i < m; ++i) {
        for (Eigen::Index j = 0; j < n; ++j) e(j, i) = -a.at(static_cast<std::size_t>(i), static_cast<std::size_t>(j));
        e(n, i) = r[static_cast<std::size_t>(i)];
    }
    Eigen::VectorXd f = Eigen::VectorXd::Zero(n + 1);
    f(n) = 1.0;
    const Eigen::VectorXd u = nnls(e, f);
    const Eigen::VectorXd res = e * u - f;
    if (!(std::abs(res(n)) > 1e-14)) return std::nullopt;  // constraints inconsistent
    Vector y(x.begin(), x.end());
    for (Eigen::Index j = 0; j < n; ++j) y[static_cast<std::size_t>(j)] -= res(j) / res(n);
    a.residual(y, b, r);
    if (*std::max_element(r.begin(), r.end()) > tol) return std::nullopt;
    return y;
}

}  // namespace

Vector project_onto_S(const FeasibilityProblem& problem, std::span<const double> x, double tol,
                      std::size_t max_sweeps) {
    const RowMatrix& a = problem.a();
    const Vector& b = problem.b();
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (x.size() != n) throw DimensionError("project_onto_S: x has wrong length");

    Vector y(x.begin(), x.end());
    Vector before(n);
    Vector lambda(m, 0.0);
    Vector r(m);
    a.residual(y, b, r);
    if (*std::max_element(r.begin(), r.end()) <= 0.0) return y;
    double moved = 0.0;
    for (std::size_t sweep = 0; sweep < max_sweeps; ++sweep) {
        before = y;
        for (std::size_t i = 0; i < m; ++i) {
            const double nrm = a.row_norm_sq(i);
            // Undo the previous correction for row i, then project.
            const double s = a.row_dot(i, y.data()) + lambda[i] * nrm - b[i];
            const double next = s > 0.0 ? s / nrm : 0.0;
            if (next != lambda[i]) a.row_axpy(i, lambda[i] - next, y.data());
            lambda[i] = next;
        }
        double d2 = 0.0;
        for (std::size_t j = 0; j < n; ++j) d2 += (y[j] - before[j]) * (y[j] - before[j]);
        moved = std::sqrt(d2);
        if (moved < tol || (sweep + 1) % kPolishEvery == 0) {
            if (auto exact = polish(a, b, x, lambda, tol)) return std::move(*exact);
        }
        if (moved < tol) {
            a.residual(y, b, r);
            if (std::sqrt(kernels::active().positive_sum_sq(r.data(), m)) < tol) return y;
            // Stalled with a violation left.
            if (auto exact = project_ldp(a, b, x, tol)) return std::move(*exact);
        }
    }
    if (auto exact = project_ldp(a, b, x, tol)) return std::move(*exact);
    throw ProjectionError(std::move(y), moved,
                          "project_onto_S: no convergence after " + std::to_string(max_sweeps) + " sweeps");
}

double distance_to_S(const FeasibilityProblem& problem, std::span<const double> x, double tol) {
    const Vector p = project_onto_S(problem, x, tol);
    double d2 = 0.0;
    for (std::size_t j = 0; j < p.size(); ++j) d2 += (x[j] - p[j]) * (x[j] - p[j]);
    return std::sqrt(d2);
}

double hoffman_lower_bound(const FeasibilityProblem& problem, std::size_t sample_count, std::uint64_t seed,
                           double tol) {
    const std::size_t n = problem.cols();
    const Vector center = problem.certificate() ? *problem.certificate()
                                                : project_onto_S(problem, Vector(n, 0.0), tol);
    double scale = norm2(center);
    if (scale == 0.0) scale = 1.0;
    constexpr double kRadii[] = {0.1, 1.0, 10.0};

    Rng rng(seed);
    Vector x(n);
    Vector r(problem.rows());
    double best = 0.0;
    bool any = false;
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(n));
    for (std::size_t s = 0; s < sample_count; ++s) {
        const double radius = kRadii[s % 3] * scale;
        for (std::size_t j = 0; j < n; ++j) x[j] = center[j] + radius * inv_sqrt_n * rng.normal();
        problem.a().residual(x, problem.b(), r);
        const double res_norm = std::sqrt(kernels::active().positive_sum_sq(r.data(), r.size()));
        if (!(res_norm > 0.0)) continue;
        const double ratio = distance_to_S(problem, x, tol) / res_norm;
        best = std::max(best, ratio);
        any = true;
    }
    if (!any) throw std::runtime_error("hoffman_lower_bound: every sampled point was feasible");
    return best;
}

double hoffman_upper_bound_bruteforce(const RowMatrix& a) {
    const std::size_t m = a.rows();
    const std::size_t n = a.cols();
    if (m > 12 || n > 4) throw std::invalid_argument("hoffman_upper_bound_bruteforce: limited to m <= 12, n <= 4");
    Eigen::MatrixXd dense(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(n));
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = 0; j < n; ++j) dense(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = a.at(i, j);
    }
    double best = 0.0;
    for (std::uint32_t mask = 1; mask < (1u << m); ++mask) {
        const auto k = static_cast<std::size_t>(__builtin_popcount(mask));
        if (k > n) continue;
        Eigen::MatrixXd sub(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(n));
        Eigen::Index row = 0;
        for (std::size_t i = 0; i < m; ++i) {
            if (mask & (1u << i)) sub.row(row++) = dense.row(static_cast<Eigen::Index>(i));
        }
        const Eigen::MatrixXd gram = sub * sub.transpose();
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
        const double lo = eig.eigenvalues().minCoeff();
        const double hi = eig.eigenvalues().maxCoeff();
        if (lo <= 1e-12 * hi) continue;  // rank deficient
        best = std::max(best, 1.0 / std::sqrt(lo));
    }
    return best;
}

double theoretical_factor(const StepsizePolicy& policy, double zeta, double hoffman, double frob_sq) {
    if (!(zeta > 0.0 && zeta <= 1.0 + 1e-12)) throw std::invalid_argument("theoretical_factor: zeta must lie in (0, 1]");
    if (!(hoffman > 0.0) || !std::isfinite(hoffman)) throw std::invalid_argument("theoretical_factor: Hoffman estimate must be positive");
    if (!(frob_sq > 0.0)) throw std::invalid_argument("theoretical_factor: ||A||_F^2 must be positive");
    double gain = 0.0;
    if (policy.kind == StepsizePolicy::Kind::Constant) {
        const double alpha = policy.alpha;
        if (!(alpha > 0.0 && alpha * zeta < 2.0)) throw std::invalid_argument("theoretical_factor: alpha outside (0, 2/zeta)");
        gain = (2.0 * alpha - alpha * alpha * zeta) / (hoffman * hoffman * frob_sq);
    } else {
        const double w = policy.w;
        if (!(w > 0.0 && w < 2.0)) throw std::invalid_argument("theoretical_factor: w outside (0, 2)");
        gain = (2.0 * w - w * w) / (zeta * hoffman * hoffman * frob_sq);
    }
    const double f = 1.0 - gain;
    return std::clamp(f, 0.0, std::nextafter(1.0, 0.0));
}

double empirical_factor(std::span<const double> dist_sq) {
    std::size_t len = 0;
    while (len < dist_sq.size() && dist_sq[len] > 0.0) ++len;
    if (len < 3) throw std::invalid_argument("empirical_factor: need at least 3 positive entries");
    double sk = 0.0;
    double sy = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
        sk += static_cast<double>(k);
        sy += std::log(dist_sq[k]);
    }
    const double mk = sk / static_cast<double>(len);
    const double my = sy / static_cast<double>(len);
    double num = 0.0;
    double den = 0.0;
    for (std::size_t k = 0; k < len; ++k) {
        const double dk = static_cast<double>(k) - mk;
        num += dk * (std::log(dist_sq[k]) - my);
        den += dk * dk;
    }
    return std::exp(num / den);
}

ConvergenceAnalysis analyze_convergence(const FeasibilityProblem& problem, const Partition& partition,
                                        const StepsizePolicy& policy, double hoffman_lower,
                                        std::span<const double> dist_sq_history) {
    ConvergenceAnalysis out;
    out.zeta = zeta(partition);
    out.hoffman_lower = hoffman_lower;
    out.frob_sq = problem.a().frobenius_sq();
    out.theoretical_factor = theoretical_factor(policy, out.zeta, hoffman_lower, out.frob_sq);
    out.empirical_factor = empirical_factor(dist_sq_history);
    return out;
}

}  // namespace grabp
