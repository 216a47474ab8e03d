#include "doctest.h"

#include <cmath>
#include <filesystem>
#include <limits>
#include <sstream>

#include "grabp/error.hpp"
#include "grabp/problem.hpp"
#include "grabp/rng.hpp"

using namespace grabp;

namespace {

const std::filesystem::path kData = GRABP_TEST_DATA_DIR;

double max_residual(const FeasibilityProblem& p, const Vector& x) {
    Vector r(p.rows());
    p.a().residual(x, p.b(), r);
    return *std::max_element(r.begin(), r.end());
}

}  // namespace

TEST_CASE("generate_dense has standard normal entries") {
    const RowMatrix a = generate_dense(1000, 100, 7);
    const auto v = a.dense_values();
    double mean = 0.0;
    for (double x : v) mean += x;
    mean /= static_cast<double>(v.size());
    double var = 0.0;
    for (double x : v) var += (x - mean) * (x - mean);
    var /= static_cast<double>(v.size() - 1);
    CHECK(std::abs(mean) < 0.01);
    CHECK(std::abs(var - 1.0) < 0.05);
    CHECK(a.dense_values()[0] == generate_dense(1000, 100, 7).dense_values()[0]);
}

TEST_CASE("generate_sparse hits the target density with no empty rows") {
    const RowMatrix a = generate_sparse(5000, 500, 11);
    const double target = 1.0 / (2.0 * std::log(2.5e6));
    CHECK(sparse_density(5000, 500) == doctest::Approx(target).epsilon(1e-15));
    CHECK(std::abs(a.density() - target) < 0.1 * target);
    CHECK(a.zero_rows().empty());
    CHECK(a.is_sparse());
}

TEST_CASE("synthetic right-hand side has a certificate with slack") {
    const RowMatrix a = generate_dense(50, 8, 1);
    const SyntheticRhs rhs = synth_rhs(a, 2);
    Vector r(50);
    a.residual(rhs.certificate, rhs.b, r);
    for (double v : r) {
        CHECK(v <= -0.1 + 1e-12);
        CHECK(v >= -1.0 - 1e-12);
    }
}

TEST_CASE("random_problem is reproducible and carries provenance") {
    const auto p = random_problem(ProblemKind::RandomSparse, 60, 10, 5);
    const auto q = random_problem(ProblemKind::RandomSparse, 60, 10, 5);
    CHECK(p.b() == q.b());
    CHECK(p.provenance().kind == ProblemKind::RandomSparse);
    CHECK(p.provenance().seed == std::optional<std::uint64_t>(5));
    REQUIRE(p.certificate());
    CHECK(max_residual(p, *p.certificate()) < 0.0);
}

TEST_CASE("problem construction rejects zero rows and bad sizes") {
    auto a = RowMatrix::dense(3, 2, {1, 0, 0, 0, 0, 0});
    try {
        FeasibilityProblem p(a, {0, 0, 0});
        FAIL("expected ZeroRowError");
    } catch (const ZeroRowError& e) {
        CHECK(e.rows == std::vector<std::size_t>{1, 2});
        CHECK(std::string(e.what()).find("2, 3") != std::string::npos);
    }
    CHECK_THROWS_AS(FeasibilityProblem(RowMatrix::dense(1, 1, {1}), {0, 0}), DimensionError);
}

TEST_CASE("matrix market: duplicate coordinates are summed") {
    const RowMatrix a = read_matrix_market(kData / "duplicates.mtx");
    CHECK(a.rows() == 3);
    CHECK(a.cols() == 2);
    CHECK(a.at(0, 0) == 1.5);
    CHECK(a.at(1, 0) == 2.5);
    CHECK(a.at(2, 1) == -4.0);
    CHECK(a.at(0, 1) == 0.0);
    CHECK(a.nnz() == 3);
}

TEST_CASE("matrix market: symmetric and skew-symmetric expansion") {
    const RowMatrix s = read_matrix_market(kData / "symmetric.mtx");
    CHECK(s.nnz() == 6);
    CHECK(s.at(0, 1) == -1.0);
    CHECK(s.at(1, 0) == -1.0);
    CHECK(s.at(1, 2) == 5.0);
    CHECK(s.at(2, 2) == 1.0);
    const RowMatrix k = read_matrix_market(kData / "skew.mtx");
    CHECK(k.at(1, 0) == 3.0);
    CHECK(k.at(0, 1) == -3.0);
}

TEST_CASE("matrix market: array layout is column major") {
    const RowMatrix a = read_matrix_market(kData / "array.mtx", RowMatrix::Storage::Dense);
    CHECK(a.at(0, 0) == 1.0);
    CHECK(a.at(0, 2) == 3.0);
    CHECK(a.at(1, 0) == 4.0);
    CHECK(a.at(1, 2) == 6.0);
}

TEST_CASE("matrix market: errors report line numbers") {
    try {
        read_matrix_market(kData / "bad_entry.mtx");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 4);
    }
    try {
        read_matrix_market(kData / "bad_header.mtx");
        FAIL("expected ParseError");
    } catch (const ParseError& e) {
        CHECK(e.line == 1);
    }
    std::istringstream truncated("%%MatrixMarket matrix coordinate real general\n2 2 3\n1 1 1\n");
    CHECK_THROWS_AS(read_matrix_market(truncated), ParseError);
    CHECK_THROWS_AS(read_matrix_market(kData / "missing.mtx"), IoError);
}

TEST_CASE("LP file round trip and stacking") {
    const LpInstance lp = read_lp_instance(kData / "small.lp");
    CHECK(lp.p_star == std::optional<double>(0.0));
    REQUIRE(lp.x_star);
    const FeasibilityProblem p = lp_to_feasibility(lp);
    CHECK(p.rows() == 7);
    CHECK(p.provenance().kind == ProblemKind::LpTransform);
    CHECK(max_residual(p, {0, 2}) <= 0.0);
    // (1, 1) satisfies the equality and the bounds but not c^T x <= p*.
    Vector r(p.rows());
    p.a().residual(Vector{1, 1}, p.b(), r);
    for (std::size_t i = 0; i + 1 < r.size(); ++i) CHECK(r[i] <= 0.0);
    CHECK(r.back() == 1.0);
}

TEST_CASE("LP stacking drops rows for infinite bounds") {
    LpInstance lp = read_lp_instance(kData / "unbounded.lp");
    CHECK_FALSE(lp.p_star);
    CHECK(std::isinf(lp.lower[0]));
    CHECK(std::isinf(lp.upper[1]));
    CHECK_THROWS_AS(lp_to_feasibility(lp), std::invalid_argument);
    lp.p_star = 4.0;
    const FeasibilityProblem p = lp_to_feasibility(lp);
    // 2 equality rows, u3, l2, l3, cost.
    CHECK(p.rows() == 6);
    CHECK(p.provenance().notes.size() == 3);
}

TEST_CASE("LP reader rejects malformed input") {
    std::istringstream bad_index("lp 1 2 0\nAeq\n1 3 1\nbeq 1\nl 0 0\nu 1 1\nc 1 1\n");
    CHECK_THROWS_AS(read_lp_instance(bad_index), ParseError);
    std::istringstream missing("lp 1 2 0\nAeq\n1 1 1\nbeq 1\nl 0 0\nc 1 1\n");
    CHECK_THROWS_AS(read_lp_instance(missing), ParseError);
    std::istringstream crossed("lp 0 1 0\nl 2\nu 1\nc 1\n");
    CHECK_THROWS_AS(read_lp_instance(crossed), std::invalid_argument);
}
