#include "grabp/bench.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"

#include "grabp/analysis.hpp"
#include "grabp/error.hpp"
#include "grabp/rng.hpp"

namespace grabp {

using nlohmann::json;

// ---------------------------------------------------------------------------
// Config

BlockCount BlockCount::parse(const std::string& text) {
    BlockCount t;
    if (text == "norm2") {
        t.norm2 = true;
        return t;
    }
    try {
        std::size_t used = 0;
        const long long v = std::stoll(text, &used);
        if (used != text.size() || v < 1) throw std::invalid_argument(text);
        t.value = static_cast<std::size_t>(v);
    } catch (const std::exception&) {
        throw ConfigError("t", "expected a positive integer or 'norm2', got '" + text + "'");
    }
    return t;
}

std::string BlockCount::str() const { return norm2 ? "norm2" : std::to_string(value); }

namespace {

const std::vector<std::string> kSolvers{"rp", "skm", "grabp-c", "grabp-a", "gskm", "paskm"};

bool is_grabp(const std::string& name) { return name == "grabp-c" || name == "grabp-a"; }

const char* kind_token(ProblemKind kind) {
    switch (kind) {
        case ProblemKind::RandomDense: return "random-dense";
        case ProblemKind::RandomSparse: return "random-sparse";
        case ProblemKind::MatrixMarket: return "mtx";
        case ProblemKind::LpTransform: return "lp";
        case ProblemKind::Custom: return "custom";
    }
    return "custom";
}

std::optional<double> parse_optional_double(const std::string& field, const std::string& text) {
    if (text == "none") return std::nullopt;
    try {
        std::size_t used = 0;
        const double v = std::stod(text, &used);
        if (used != text.size()) throw std::invalid_argument(text);
        return v;
    } catch (const std::exception&) {
        throw ConfigError(field, "expected a number or 'none', got '" + text + "'");
    }
}

std::string fmt_double(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

}  // namespace

void BenchConfig::validate() const {
    const bool random = instance.kind == ProblemKind::RandomDense || instance.kind == ProblemKind::RandomSparse;
    if (random) {
        if (instance.m < 1) throw ConfigError("m", "must be at least 1");
        if (instance.n < 1) throw ConfigError("n", "must be at least 1");
        if (instance.kind == ProblemKind::RandomSparse && instance.m * instance.n < 2) {
            throw ConfigError("n", "random-sparse needs m*n >= 2");
        }
    } else if (instance.path.empty()) {
        throw ConfigError("path", "required for mtx and lp instances");
    }
    if (std::find(kSolvers.begin(), kSolvers.end(), solver.name) == kSolvers.end()) {
        throw ConfigError("solver", "unknown solver '" + solver.name + "'");
    }
    if (!(solver.w > 0.0 && solver.w < 2.0)) throw ConfigError("w", "must lie in (0, 2)");
    if (!(solver.alpha_scale > 0.0 && solver.alpha_scale < 2.0)) {
        throw ConfigError("alpha-scale", "must lie in (0, 2) so that alpha lies in (0, 2/zeta)");
    }
    if (solver.beta < 1) throw ConfigError("beta", "must be at least 1");
    if (!(solver.delta > 0.0 && solver.delta < 2.0)) throw ConfigError("delta", "must lie in (0, 2)");
    if (trials < 1) throw ConfigError("trials", "must be at least 1");
    if (jobs < 1) throw ConfigError("jobs", "must be at least 1");
    if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta", "must lie in [0, 1]");
    if (!(exponent > 0.0)) throw ConfigError("exponent", "must be positive");
    if (random) {
        auto check_t = [&](const BlockCount& bc) {
            if (!bc.norm2 && bc.value > instance.m) {
                throw ConfigError("t", "t=" + std::to_string(bc.value) + " exceeds m=" + std::to_string(instance.m));
            }
        };
        if (t_list.empty() && is_grabp(solver.name)) check_t(t);
    }
    if (stopping.res_tol && !(*stopping.res_tol >= 0.0)) throw ConfigError("res-tol", "must be non-negative");
    if (stopping.phi && !(*stopping.phi < 1.0)) throw ConfigError("phi", "must be below 1");
    if (stopping.wall_clock_seconds && !(*stopping.wall_clock_seconds > 0.0)) {
        throw ConfigError("time-cap", "must be positive");
    }
    if (!stopping.res_tol && !stopping.phi && !stopping.max_iters && !stopping.wall_clock_seconds) {
        throw ConfigError("res-tol", "at least one stopping rule must be set");
    }
}

BenchConfig parse_config(const std::vector<std::string>& args) {
    BenchConfig cfg;
    CLI::App app{"Benchmark harness for randomized projection solvers of Ax <= b", "grabp_bench"};
    app.set_config("--config", "", "TOML/INI file with default values; flags override it");
    app.allow_config_extras(false);

    std::string instance = "random-dense";
    std::string t_text = "10";
    std::vector<std::string> t_list;
    std::string res_tol = "1e-8";
    std::string time_cap = "50";
    double phi = 0.0;
    std::size_t max_iters = 0;
    std::string format = "csv";
    std::string criterion = "pnorm";

    app.add_option("--instance", instance, "random-dense | random-sparse | mtx | lp")->capture_default_str();
    app.add_option("--m", cfg.instance.m, "Rows of a random instance")->capture_default_str();
    app.add_option("--n", cfg.instance.n, "Columns of a random instance")->capture_default_str();
    app.add_option("--path", cfg.instance.path, "Matrix Market or LP file");
    app.add_option("--solver", cfg.solver.name, "rp | skm | grabp-c | grabp-a | gskm | paskm")->capture_default_str();
    app.add_option("--beta", cfg.solver.beta, "SKM sample size (clamped to m)")->capture_default_str();
    app.add_option("--delta", cfg.solver.delta, "SKM relaxation in (0, 2)")->capture_default_str();
    app.add_option("--alpha-scale", cfg.solver.alpha_scale, "grabp-c stepsize alpha = scale / zeta")->capture_default_str();
    app.add_option("--w", cfg.solver.w, "grabp-a stepsize parameter in (0, 2)")->capture_default_str();
    app.add_option("--momentum", cfg.solver.gskm.momentum, "gskm momentum");
    app.add_option("--t", t_text, "Block count, or norm2 for ceil(||A||_2^2)")->capture_default_str();
    app.add_option("--t-list", t_list, "Run a block sweep over these block counts")->delimiter(',');
    app.add_option("--trials", cfg.trials, "Trials per configuration")->capture_default_str();
    app.add_option("--seed", cfg.seed, "Base seed; trial i uses seed + i")->capture_default_str();
    app.add_option("--res-tol", res_tol, "RES stopping tolerance, or none")->capture_default_str();
    auto* phi_opt = app.add_option("--phi", phi, "Tolerance gap for max(Ax-b)/max(Ax0-b)");
    auto* iters_opt = app.add_option("--max-iters", max_iters, "Iteration cap");
    app.add_option("--time-cap", time_cap, "Wall-clock cap in seconds, or none")->capture_default_str();
    app.add_flag("--history", cfg.history, "Write per-iteration RES trajectories");
    app.add_flag("--distance", cfg.distance, "Add distance to S to the history (small instances only)");
    app.add_option("--format", format, "csv | json")->capture_default_str();
    app.add_option("--output", cfg.output, "Report path (relative paths use $GRABP_OUTPUT_DIR)");
    app.add_option("--theta", cfg.theta, "Greedy relaxation parameter in [0, 1]")->capture_default_str();
    app.add_option("--criterion", criterion, "pnorm | two-norm-power")->capture_default_str();
    app.add_option("--exponent", cfg.exponent, "p for pnorm, mu for two-norm-power")->capture_default_str();
    app.add_option("--jobs", cfg.jobs, "Trials run in parallel")->capture_default_str();
    app.add_flag("--fix-instance", cfg.fix_instance, "Reuse the first trial's random instance in every trial");
    app.add_flag("--dump-solution", cfg.dump_solution, "Write final iterates");

    std::vector<std::string> argv_storage;
    argv_storage.reserve(args.size() + 1);
    argv_storage.emplace_back("grabp_bench");
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<const char*> argv;
    for (const auto& a : argv_storage) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        throw HelpRequested{app.help()};
    } catch (const CLI::ParseError& e) {
        throw ConfigError("arguments", e.what());
    }

    if (instance == "random-dense") {
        cfg.instance.kind = ProblemKind::RandomDense;
    } else if (instance == "random-sparse") {
        cfg.instance.kind = ProblemKind::RandomSparse;
    } else if (instance == "mtx") {
        cfg.instance.kind = ProblemKind::MatrixMarket;
    } else if (instance == "lp") {
        cfg.instance.kind = ProblemKind::LpTransform;
    } else {
        throw ConfigError("instance", "unknown instance kind '" + instance + "'");
    }
    cfg.t = BlockCount::parse(t_text);
    for (const auto& s : t_list) cfg.t_list.push_back(BlockCount::parse(s));
    cfg.stopping.res_tol = parse_optional_double("res-tol", res_tol);
    cfg.stopping.wall_clock_seconds = parse_optional_double("time-cap", time_cap);
    if (phi_opt->count() > 0) cfg.stopping.phi = phi;
    if (iters_opt->count() > 0) cfg.stopping.max_iters = max_iters;
    if (format == "csv") {
        cfg.format = OutputFormat::Csv;
    } else if (format == "json") {
        cfg.format = OutputFormat::Json;
    } else {
        throw ConfigError("format", "must be csv or json");
    }
    if (criterion == "pnorm") {
        cfg.criterion = Criterion::PNorm;
    } else if (criterion == "two-norm-power") {
        cfg.criterion = Criterion::TwoNormPower;
    } else {
        throw ConfigError("criterion", "must be pnorm or two-norm-power");
    }
    cfg.solver.gskm.beta = cfg.solver.paskm.beta = cfg.solver.beta;
    cfg.solver.gskm.delta = cfg.solver.paskm.delta = cfg.solver.delta;
    cfg.validate();
    return cfg;
}

// ---------------------------------------------------------------------------
// Running

bool RunReport::any_forced() const {
    return std::any_of(trials.begin(), trials.end(), [](const TrialRecord& r) { return r.stop == StopReason::WallClock; });
}

void RunReport::aggregate() {
    double it = 0.0;
    double sec = 0.0;
    double res_sum = 0.0;
    for (const auto& r : trials) {
        it += static_cast<double>(r.iterations);
        sec += r.seconds;
        res_sum += r.terminal_res;
    }
    const double count = trials.empty() ? 1.0 : static_cast<double>(trials.size());
    mean_iterations = it / count;
    mean_seconds = sec / count;
    mean_terminal_res = res_sum / count;
}

MethodConfig make_method(const BenchConfig& config, std::size_t t, std::size_t m) {
    const SolverSpec& s = config.solver;
    if (s.name == "rp") return RpConfig{};
    if (s.name == "skm") return SkmConfig{std::min(s.beta, m), s.delta};
    if (s.name == "gskm") return s.gskm;
    if (s.name == "paskm") return s.paskm;
    GrabpConfig g;
    g.kind = s.name == "grabp-c" ? StepsizePolicy::Kind::Constant : StepsizePolicy::Kind::Adaptive;
    g.alpha_scale = s.alpha_scale;
    g.w = s.w;
    g.t = t;
    g.selection = SelectionConfig{config.theta, config.criterion, config.exponent};
    return g;
}

namespace {

std::string instance_label(const BenchConfig& config) {
    const auto& inst = config.instance;
    if (inst.kind == ProblemKind::RandomDense || inst.kind == ProblemKind::RandomSparse) {
        return std::string(kind_token(inst.kind)) + " " + std::to_string(inst.m) + "x" + std::to_string(inst.n);
    }
    return std::filesystem::path(inst.path).filename().string();
}

std::size_t resolve_t(const BlockCount& bc, const RowMatrix& a) {
    std::size_t t = bc.value;
    if (bc.norm2) t = static_cast<std::size_t>(std::ceil(spectral_norm_squared(a).value));
    if (t < 1) t = 1;
    if (t > a.rows()) {
        throw ConfigError("t", "t=" + std::to_string(t) + " exceeds m=" + std::to_string(a.rows()));
    }
    return t;
}

}  // namespace

RunReport run_benchmark(const BenchConfig& config) {
    config.validate();
    RunReport report;
    report.config = config;
    report.solver = config.solver.name;
    report.instance = instance_label(config);
    report.trials.resize(config.trials);

    const auto& inst = config.instance;
    const bool random = inst.kind == ProblemKind::RandomDense || inst.kind == ProblemKind::RandomSparse;
    std::optional<FeasibilityProblem> base;
    if (inst.kind == ProblemKind::MatrixMarket) {
        RowMatrix a = read_matrix_market(std::filesystem::path(inst.path));
        Provenance prov;
        prov.kind = ProblemKind::MatrixMarket;
        prov.source = inst.path;
        base.emplace(std::move(a), Vector(a.rows(), 0.0), std::move(prov));
    } else if (inst.kind == ProblemKind::LpTransform) {
        base.emplace(lp_to_feasibility(read_lp_instance(std::filesystem::path(inst.path))));
        report.warnings.insert(report.warnings.end(), base->provenance().notes.begin(), base->provenance().notes.end());
    } else if (config.fix_instance) {
        base.emplace(random_problem(inst.kind, inst.m, inst.n, config.seed));
    }

    auto run_trial = [&](std::size_t i) {
        const std::uint64_t seed = config.seed + i;
        std::optional<FeasibilityProblem> problem;
        if (random && !config.fix_instance) {
            problem.emplace(random_problem(inst.kind, inst.m, inst.n, seed));
        } else if (inst.kind == ProblemKind::MatrixMarket) {
            auto rhs = synth_rhs(base->a(), derive_seed(seed, 1));
            problem.emplace(base->with_rhs(std::move(rhs.b), std::move(rhs.certificate)));
        } else {
            problem.emplace(*base);
        }
        const bool grabp = is_grabp(config.solver.name);
        const std::size_t t = grabp ? resolve_t(config.t, problem->a()) : 0;

        RunOptions opts;
        opts.seed = seed;
        opts.record_history = config.history;
        if (config.history && config.distance) {
            const FeasibilityProblem* p = &*problem;
            opts.distance_probe = [p](std::span<const double> x) { return distance_to_S(*p, x); };
        }
        RunResult result = run(*problem, make_method(config, t, problem->rows()), config.stopping, opts);

        TrialRecord& rec = report.trials[i];
        rec.trial = i;
        rec.seed = seed;
        rec.m = problem->rows();
        rec.n = problem->cols();
        rec.t = t;
        rec.iterations = result.iterations;
        rec.seconds = result.seconds;
        rec.terminal_res = result.terminal_res;
        rec.stop = result.stop;
        rec.history = std::move(result.history);
        if (config.dump_solution) rec.solution = std::move(result.x);
    };

    if (config.jobs <= 1 || config.trials == 1) {
        for (std::size_t i = 0; i < config.trials; ++i) run_trial(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::mutex error_mutex;
        std::exception_ptr error;
        std::vector<std::jthread> workers;
        const std::size_t count = std::min(config.jobs, config.trials);
        for (std::size_t w = 0; w < count; ++w) {
            workers.emplace_back([&] {
                for (std::size_t i = next++; i < config.trials; i = next++) {
                    try {
                        run_trial(i);
                    } catch (...) {
                        std::lock_guard lock(error_mutex);
                        if (!error) error = std::current_exception();
                    }
                }
            });
        }
        workers.clear();
        if (error) std::rethrow_exception(error);
    }
    report.aggregate();
    return report;
}

SweepReport block_sweep(const BenchConfig& config, const std::vector<BlockCount>& t_list) {
    SweepReport sweep;
    std::optional<std::size_t> m;
    const auto& inst = config.instance;
    if (inst.kind == ProblemKind::RandomDense || inst.kind == ProblemKind::RandomSparse) m = inst.m;
    for (const BlockCount& bc : t_list) {
        if (m && !bc.norm2 && bc.value > *m) {
            sweep.warnings.push_back("t=" + bc.str() + " exceeds m=" + std::to_string(*m) + "; skipped");
            continue;
        }
        BenchConfig cfg = config;
        cfg.t = bc;
        cfg.t_list.clear();
        try {
            sweep.entries.push_back({bc, run_benchmark(cfg)});
        } catch (const ConfigError& e) {
            if (e.field != "t") throw;
            sweep.warnings.push_back(std::string(e.what()) + "; skipped");
        }
    }
    return sweep;
}

// ---------------------------------------------------------------------------
// Serialization

void to_json(json& j, const GskmParams& p) {
    j = json{{"beta", p.beta}, {"delta", p.delta}, {"momentum", p.momentum}};
}

void from_json(const json& j, GskmParams& p) {
    j.at("beta").get_to(p.beta);
    j.at("delta").get_to(p.delta);
    j.at("momentum").get_to(p.momentum);
}

void to_json(json& j, const PaskmParams& p) {
    j = json{{"beta", p.beta}, {"delta", p.delta}, {"gamma", p.gamma}, {"omega", p.omega}};
}

void from_json(const json& j, PaskmParams& p) {
    j.at("beta").get_to(p.beta);
    j.at("delta").get_to(p.delta);
    j.at("gamma").get_to(p.gamma);
    j.at("omega").get_to(p.omega);
}

json to_json(const BenchConfig& c) {
    json stopping = json::object();
    stopping["res_tol"] = c.stopping.res_tol ? json(*c.stopping.res_tol) : json(nullptr);
    stopping["phi"] = c.stopping.phi ? json(*c.stopping.phi) : json(nullptr);
    stopping["max_iters"] = c.stopping.max_iters ? json(*c.stopping.max_iters) : json(nullptr);
    stopping["time_cap"] = c.stopping.wall_clock_seconds ? json(*c.stopping.wall_clock_seconds) : json(nullptr);
    json t_list = json::array();
    for (const auto& bc : c.t_list) t_list.push_back(bc.str());
    return json{
        {"instance", {{"kind", kind_token(c.instance.kind)}, {"m", c.instance.m}, {"n", c.instance.n}, {"path", c.instance.path}}},
        {"solver",
         {{"name", c.solver.name},
          {"beta", c.solver.beta},
          {"delta", c.solver.delta},
          {"alpha_scale", c.solver.alpha_scale},
          {"w", c.solver.w},
          {"gskm", c.solver.gskm},
          {"paskm", c.solver.paskm}}},
        {"t", c.t.str()},
        {"t_list", t_list},
        {"trials", c.trials},
        {"seed", c.seed},
        {"stopping", stopping},
        {"history", c.history},
        {"distance", c.distance},
        {"format", c.format == OutputFormat::Csv ? "csv" : "json"},
        {"theta", c.theta},
        {"criterion", c.criterion == Criterion::PNorm ? "pnorm" : "two-norm-power"},
        {"exponent", c.exponent},
        {"jobs", c.jobs},
        {"fix_instance", c.fix_instance},
        {"simd", kernels::active().name},
    };
}

json report_to_json(const RunReport& report) {
    json trials = json::array();
    std::size_t forced = 0;
    for (const auto& r : report.trials) {
        json t{{"trial", r.trial},
               {"seed", r.seed},
               {"m", r.m},
               {"n", r.n},
               {"t", r.t},
               {"iterations", r.iterations},
               {"seconds", r.seconds},
               {"terminal_res", r.terminal_res},
               {"stop_reason", to_string(r.stop)}};
        if (!r.solution.empty()) t["solution"] = r.solution;
        trials.push_back(std::move(t));
        if (r.stop == StopReason::WallClock) ++forced;
    }
    return json{{"schema", "grabp-report"},
                {"version", kReportSchemaVersion},
                {"solver", report.solver},
                {"instance", report.instance},
                {"config", to_json(report.config)},
                {"trials", trials},
                {"aggregates",
                 {{"trials", report.trials.size()},
                  {"mean_iterations", report.mean_iterations},
                  {"mean_seconds", report.mean_seconds},
                  {"mean_terminal_res", report.mean_terminal_res},
                  {"forced_trials", forced}}},
                {"warnings", report.warnings}};
}

void write_csv(const RunReport& report, std::ostream& out, bool header) {
    if (header) out << "solver,instance,m,n,t,trial,iterations,seconds,terminal_res,stop_reason\n";
    for (const auto& r : report.trials) {
        out << report.solver << ',' << report.instance << ',' << r.m << ',' << r.n << ',' << r.t << ',' << r.trial << ','
            << r.iterations << ',' << fmt_double(r.seconds) << ',' << fmt_double(r.terminal_res) << ','
            << to_string(r.stop) << '\n';
    }
    const TrialRecord first = report.trials.empty() ? TrialRecord{} : report.trials.front();
    out << report.solver << ',' << report.instance << ',' << first.m << ',' << first.n << ',' << first.t << ",mean,"
        << fmt_double(report.mean_iterations) << ',' << fmt_double(report.mean_seconds) << ','
        << fmt_double(report.mean_terminal_res) << ",aggregate\n";
}

void write_history_csv(const RunReport& report, std::ostream& out, bool header) {
    const bool with_distance = std::any_of(report.trials.begin(), report.trials.end(), [](const TrialRecord& r) {
        return !r.history.empty() && r.history.front().distance.has_value();
    });
    if (header) out << "t,trial,iteration,res" << (with_distance ? ",distance" : "") << '\n';
    for (const auto& r : report.trials) {
        for (const auto& h : r.history) {
            out << r.t << ',' << r.trial << ',' << h.iteration << ',' << fmt_double(h.res);
            if (with_distance) out << ',' << (h.distance ? fmt_double(*h.distance) : "");
            out << '\n';
        }
    }
}

namespace {

std::ofstream open_for_write(const std::filesystem::path& path) {
    if (path.has_parent_path()) {
        std::error_code ec;
        std::filesystem::create_directories(path.parent_path(), ec);
    }
    std::ofstream out(path);
    if (!out) throw IoError("cannot write " + path.string());
    return out;
}

std::filesystem::path companion(const std::filesystem::path& path, const std::string& suffix) {
    return path.parent_path() / (path.stem().string() + suffix);
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.flush();
    if (!out) throw IoError("error writing " + path.string());
}

void write_solutions(const std::vector<const RunReport*>& reports, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    out << "t,trial,index,value\n";
    for (const RunReport* rep : reports) {
        for (const auto& r : rep->trials) {
            for (std::size_t j = 0; j < r.solution.size(); ++j) {
                out << r.t << ',' << r.trial << ',' << j << ',' << fmt_double(r.solution[j]) << '\n';
            }
        }
    }
    finish(out, path);
}

}  // namespace

std::filesystem::path resolve_output_path(const std::string& output) {
    std::filesystem::path p(output);
    if (p.is_relative()) {
        if (const char* dir = std::getenv("GRABP_OUTPUT_DIR"); dir != nullptr && *dir != '\0') {
            p = std::filesystem::path(dir) / p;
        }
    }
    return p;
}

void emit_report(const RunReport& report, OutputFormat format, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    if (format == OutputFormat::Json) {
        out << report_to_json(report).dump(2) << '\n';
    } else {
        write_csv(report, out);
        auto cfg = open_for_write(companion(path, ".config.json"));
        cfg << to_json(report.config).dump(2) << '\n';
        finish(cfg, companion(path, ".config.json"));
    }
    finish(out, path);
    if (report.config.history) {
        const auto hp = companion(path, ".history.csv");
        auto hist = open_for_write(hp);
        write_history_csv(report, hist);
        finish(hist, hp);
    }
    if (report.config.dump_solution) write_solutions({&report}, companion(path, ".solutions.csv"));
}

void emit_sweep(const SweepReport& sweep, OutputFormat format, const std::filesystem::path& path) {
    auto out = open_for_write(path);
    if (format == OutputFormat::Json) {
        json entries = json::array();
        for (const auto& e : sweep.entries) entries.push_back(json{{"t", e.t.str()}, {"report", report_to_json(e.report)}});
        out << json{{"schema", "grabp-sweep"}, {"version", kReportSchemaVersion}, {"entries", entries}, {"warnings", sweep.warnings}}.dump(2)
            << '\n';
    } else {
        bool header = true;
        for (const auto& e : sweep.entries) {
            write_csv(e.report, out, header);
            header = false;
        }
    }
    finish(out, path);
    if (sweep.entries.empty()) return;
    const BenchConfig& cfg = sweep.entries.front().report.config;
    if (cfg.history) {
        const auto hp = companion(path, ".history.csv");
        auto hist = open_for_write(hp);
        bool header = true;
        for (const auto& e : sweep.entries) {
            write_history_csv(e.report, hist, header);
            header = false;
        }
        finish(hist, hp);
    }
    if (cfg.dump_solution) {
        std::vector<const RunReport*> reps;
        for (const auto& e : sweep.entries) reps.push_back(&e.report);
        write_solutions(reps, companion(path, ".solutions.csv"));
    }
}

}  // namespace grabp
