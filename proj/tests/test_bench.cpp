#include "doctest.h"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "grabp/bench.hpp"
#include "grabp/error.hpp"

using namespace grabp;
namespace fs = std::filesystem;

namespace {

fs::path scratch_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("grabp_test_" + name);
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& path) {
    std::ifstream in(path);
    std::vector<std::vector<std::string>> rows;
    for (std::string line; std::getline(in, line);) {
        std::vector<std::string> cells;
        std::stringstream ss(line);
        for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
        rows.push_back(cells);
    }
    return rows;
}

BenchConfig small_config() {
    BenchConfig cfg;
    cfg.instance.m = 120;
    cfg.instance.n = 12;
    cfg.solver.name = "grabp-a";
    cfg.t = BlockCount::parse("6");
    cfg.trials = 10;
    cfg.seed = 3;
    return cfg;
}

}  // namespace

TEST_CASE("parse_config: defaults and flag values") {
    const BenchConfig cfg = parse_config({"--solver", "grabp-c", "--alpha-scale", "1.95", "--t", "norm2", "--m", "50",
                                          "--n", "5", "--res-tol", "none", "--max-iters", "100"});
    CHECK(cfg.solver.name == "grabp-c");
    CHECK(cfg.solver.alpha_scale == 1.95);
    CHECK(cfg.t.norm2);
    CHECK_FALSE(cfg.stopping.res_tol);
    CHECK(cfg.stopping.max_iters == std::optional<std::size_t>(100));
    CHECK(cfg.stopping.wall_clock_seconds == std::optional<double>(50.0));
    const BenchConfig d = parse_config({});
    CHECK(d.solver.name == "grabp-a");
    CHECK(d.trials == 10);
    CHECK(d.theta == 0.5);
    CHECK(d.stopping.res_tol == std::optional<double>(1e-8));
    CHECK(parse_config({"--t-list", "2,10,100"}).t_list.size() == 3);
}

TEST_CASE("parse_config rejects out-of-range and unknown input") {
    auto field_of = [](std::vector<std::string> args) {
        try {
            parse_config(args);
        } catch (const ConfigError& e) {
            return e.field;
        }
        return std::string("<accepted>");
    };
    CHECK(field_of({"--w", "2.5"}) == "w");
    CHECK(field_of({"--alpha-scale", "2"}) == "alpha-scale");
    CHECK(field_of({"--t", "0"}) == "t");
    CHECK(field_of({"--t", "5000"}) == "t");
    CHECK(field_of({"--solver", "cg"}) == "solver");
    CHECK(field_of({"--instance", "mtx"}) == "path");
    CHECK(field_of({"--bogus"}) == "arguments");
    CHECK(field_of({"--format", "xml"}) == "format");
    CHECK(field_of({"--res-tol", "none", "--time-cap", "none"}) == "res-tol");
    CHECK_THROWS_AS(parse_config({"--help"}), HelpRequested);
}

TEST_CASE("parse_config: flags override the config file") {
    const fs::path dir = scratch_dir("config");
    const fs::path file = dir / "bench.toml";
    {
        std::ofstream out(file);
        out << "trials = 5\nsolver = \"rp\"\nm = 200\n";
    }
    const BenchConfig cfg = parse_config({"--config", file.string(), "--trials", "10"});
    CHECK(cfg.trials == 10);
    CHECK(cfg.solver.name == "rp");
    CHECK(cfg.instance.m == 200);
    {
        std::ofstream out(dir / "extra.toml");
        out << "trials = 5\nunknown_key = 1\n";
    }
    CHECK_THROWS_AS(parse_config({"--config", (dir / "extra.toml").string()}), ConfigError);
}

TEST_CASE("run_benchmark: seeds, aggregates and reproducibility") {
    const RunReport r = run_benchmark(small_config());
    REQUIRE(r.trials.size() == 10);
    double sum = 0.0;
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(r.trials[i].seed == 3 + i);
        CHECK(r.trials[i].t == 6);
        CHECK(r.trials[i].terminal_res <= 1e-8);
        sum += static_cast<double>(r.trials[i].iterations);
    }
    CHECK(r.mean_iterations == doctest::Approx(sum / 10.0));
    CHECK_FALSE(r.any_forced());

    BenchConfig par = small_config();
    par.jobs = 3;
    const RunReport q = run_benchmark(par);
    for (std::size_t i = 0; i < 10; ++i) CHECK(q.trials[i].iterations == r.trials[i].iterations);
}

TEST_CASE("emit_report: csv and json carry the same numbers") {
    const fs::path dir = scratch_dir("emit");
    BenchConfig cfg = small_config();
    cfg.history = true;
    const RunReport r = run_benchmark(cfg);
    emit_report(r, OutputFormat::Csv, dir / "run.csv");
    emit_report(r, OutputFormat::Json, dir / "run.json");

    const auto rows = read_csv(dir / "run.csv");
    REQUIRE(rows.size() == 12);
    CHECK(rows[0][6] == "iterations");
    CHECK(rows[11][5] == "mean");
    CHECK(rows[11][9] == "aggregate");
    CHECK(fs::exists(dir / "run.config.json"));

    std::ifstream jin(dir / "run.json");
    const auto j = nlohmann::json::parse(jin);
    CHECK(j["schema"] == "grabp-report");
    CHECK(j["version"] == kReportSchemaVersion);
    REQUIRE(j["trials"].size() == 10);
    for (std::size_t i = 0; i < 10; ++i) {
        CHECK(std::stoull(rows[i + 1][6]) == j["trials"][i]["iterations"].get<std::size_t>());
        CHECK(std::stod(rows[i + 1][8]) == j["trials"][i]["terminal_res"].get<double>());
        CHECK(rows[i + 1][9] == j["trials"][i]["stop_reason"].get<std::string>());
    }
    CHECK(std::stod(rows[11][6]) == j["aggregates"]["mean_iterations"].get<double>());

    const auto hist = read_csv(dir / "run.history.csv");
    REQUIRE(hist.size() > 1);
    CHECK(hist[0] == std::vector<std::string>{"t", "trial", "iteration", "res"});
    std::size_t expected = 0;
    std::size_t trial = 0;
    for (std::size_t i = 1; i < hist.size(); ++i) {
        const std::size_t tr = std::stoull(hist[i][1]);
        if (tr != trial) {
            CHECK(expected == r.trials[trial].iterations + 1);
            trial = tr;
            expected = 0;
        }
        CHECK(std::stoull(hist[i][2]) == expected);
        ++expected;
    }
    CHECK(expected == r.trials[trial].iterations + 1);
}

TEST_CASE("emit_report: unwritable path is an IoError") {
    const fs::path dir = scratch_dir("io");
    { std::ofstream(dir / "file") << "x"; }
    const RunReport r = run_benchmark([] {
        BenchConfig c = small_config();
        c.trials = 1;
        return c;
    }());
    CHECK_THROWS_AS(emit_report(r, OutputFormat::Csv, dir / "file" / "sub" / "out.csv"), IoError);
}

TEST_CASE("block_sweep skips t above m and runs the rest") {
    BenchConfig cfg = small_config();
    cfg.trials = 2;
    cfg.instance.m = 50;
    const SweepReport s = block_sweep(cfg, {BlockCount::parse("2"), BlockCount::parse("100"), BlockCount::parse("5")});
    REQUIRE(s.entries.size() == 2);
    CHECK(s.entries[0].report.trials[0].t == 2);
    CHECK(s.entries[1].report.trials[0].t == 5);
    CHECK(s.warnings.size() == 1);
}

TEST_CASE("file-based instances: lp and matrix market") {
    BenchConfig cfg;
    cfg.instance.kind = ProblemKind::LpTransform;
    cfg.instance.path = std::string(GRABP_TEST_DATA_DIR) + "/small.lp";
    cfg.solver.name = "grabp-a";
    cfg.t = BlockCount::parse("2");
    cfg.trials = 2;
    const RunReport r = run_benchmark(cfg);
    CHECK(r.trials[0].m == 7);
    CHECK(r.instance == "small.lp");

    cfg.instance.kind = ProblemKind::MatrixMarket;
    cfg.instance.path = std::string(GRABP_TEST_DATA_DIR) + "/symmetric.mtx";
    cfg.solver.name = "skm";
    const RunReport s = run_benchmark(cfg);
    CHECK(s.trials[0].terminal_res <= 1e-8);
}

TEST_CASE("unimplemented solvers surface as errors from the harness") {
    BenchConfig cfg = small_config();
    cfg.solver.name = "paskm";
    CHECK_THROWS_AS(run_benchmark(cfg), UnimplementedError);
}

TEST_CASE("gskm and paskm parameters round-trip through json") {
    GskmParams g{7, 1.3, 0.25};
    const GskmParams g2 = nlohmann::json(g).get<GskmParams>();
    CHECK(g2.beta == 7);
    CHECK(g2.delta == 1.3);
    CHECK(g2.momentum == 0.25);
    PaskmParams p{3, 0.9, 0.1, 0.2};
    const PaskmParams p2 = nlohmann::json(p).get<PaskmParams>();
    CHECK(p2.beta == 3);
    CHECK(p2.gamma == 0.1);
    CHECK(p2.omega == 0.2);
}
