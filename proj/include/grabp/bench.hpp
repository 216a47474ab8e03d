#pragma once

// Benchmark harness: multi-trial runs on generated or file-based instances,
// averaged iteration counts and solve times, per-iteration trajectories.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "grabp/problem.hpp"
#include "grabp/solvers.hpp"

namespace grabp {

inline constexpr int kReportSchemaVersion = 1;

struct InstanceSpec {
    ProblemKind kind = ProblemKind::RandomDense;
    std::size_t m = 1000;
    std::size_t n = 100;
    std::string path;  // mtx or lp file
};

// Block count: a number, or "norm2" for ceil(||A||_2^2) resolved per instance.
struct BlockCount {
    bool norm2 = false;
    std::size_t value = 10;

    static BlockCount parse(const std::string& text);
    std::string str() const;
};

struct SolverSpec {
    std::string name = "grabp-a";  // rp | skm | grabp-c | grabp-a | gskm | paskm
    std::size_t beta = 50;         // SKM sample size, clamped to m
    double delta = 1.0;            // SKM relaxation
    double alpha_scale = 1.0;      // grabp-c: alpha = alpha_scale / zeta
    double w = 1.0;                // grabp-a
    GskmParams gskm;
    PaskmParams paskm;
};

enum class OutputFormat { Csv, Json };

struct BenchConfig {
    InstanceSpec instance;
    SolverSpec solver;
    BlockCount t;
    std::vector<BlockCount> t_list;  // non-empty: block sweep
    std::size_t trials = 10;
    std::uint64_t seed = 0;
    StoppingCriterion stopping;
    bool history = false;
    bool distance = false;  // add distance-to-S column to history (desk scale only)
    OutputFormat format = OutputFormat::Csv;
    std::string output;     // empty: stdout summary only
    double theta = 0.5;
    Criterion criterion = Criterion::PNorm;
    double exponent = 2.0;
    std::size_t jobs = 1;
    bool fix_instance = false;
    bool dump_solution = false;

    // Range checks that need no instance; throws ConfigError naming the field.
    void validate() const;
};

struct HelpRequested {
    std::string text;
};

// Parses command-line flags; an optional --config file (TOML/INI) supplies
// defaults that flags override. Throws ConfigError on unknown flags or
// invalid values and HelpRequested for --help.
BenchConfig parse_config(const std::vector<std::string>& args);

struct TrialRecord {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    std::size_t m = 0;
    std::size_t n = 0;
    std::size_t t = 0;
    std::size_t iterations = 0;
    double seconds = 0.0;
    double terminal_res = 0.0;
    StopReason stop = StopReason::MaxIterations;
    std::vector<HistoryPoint> history;
    Vector solution;  // filled when dump_solution is set
};

struct RunReport {
    BenchConfig config;
    std::string solver;
    std::string instance;
    std::vector<TrialRecord> trials;
    double mean_iterations = 0.0;
    double mean_seconds = 0.0;
    double mean_terminal_res = 0.0;
    std::vector<std::string> warnings;

    bool any_forced() const;
    void aggregate();
};

MethodConfig make_method(const BenchConfig& config, std::size_t t, std::size_t m);

// Trial i uses seed config.seed + i. Random instances are regenerated per
// trial (unless fix_instance); file-based matrices are loaded once and get
// a fresh synthetic right-hand side per trial; LP instances are fixed.
RunReport run_benchmark(const BenchConfig& config);

struct SweepEntry {
    BlockCount t;
    RunReport report;
};

struct SweepReport {
    std::vector<SweepEntry> entries;
    std::vector<std::string> warnings;  // skipped t values
};

// One run_benchmark per entry of t_list with a shared base seed; entries
// with t > m are skipped with a warning.
SweepReport block_sweep(const BenchConfig& config, const std::vector<BlockCount>& t_list);

nlohmann::json to_json(const BenchConfig& config);
nlohmann::json report_to_json(const RunReport& report);
void write_csv(const RunReport& report, std::ostream& out, bool header = true);
void write_history_csv(const RunReport& report, std::ostream& out, bool header = true);

// Writes <path> in the requested format; with history on, also
// <stem>.history.csv; with dump_solution, <stem>.solutions.csv; for CSV
// output, the resolved configuration goes to <stem>.config.json.
// Throws IoError when a file cannot be written.
void emit_report(const RunReport& report, OutputFormat format, const std::filesystem::path& path);
void emit_sweep(const SweepReport& sweep, OutputFormat format, const std::filesystem::path& path);

// Relative output paths resolve against $GRABP_OUTPUT_DIR when it is set.
std::filesystem::path resolve_output_path(const std::string& output);

void to_json(nlohmann::json& j, const GskmParams& p);
void from_json(const nlohmann::json& j, GskmParams& p);
void to_json(nlohmann::json& j, const PaskmParams& p);
void from_json(const nlohmann::json& j, PaskmParams& p);

}  // namespace grabp
