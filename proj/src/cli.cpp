#include "cade/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "cade/lcp_oracle.hpp"
#include "cade/metrics.hpp"

namespace cade::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Errors below this are treated as round-off and give no meaningful order.
constexpr double kRoundOffError = 1e-12;

std::string utc_stamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    std::ostringstream os;
    os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
    return os.str();
}

void write_atomic(const fs::path& path, const std::string& content) {
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
        if (!os) throw std::runtime_error("cannot write " + tmp.string());
        os << content;
        if (!os.flush()) throw std::runtime_error("write failed for " + tmp.string());
    }
    fs::rename(tmp, path);
}

ScalarField load_field(const std::string& ref, const char* option) {
    if (ref.empty() || ref[0] != '@')
        throw InvalidArgument(std::string(option) + ": expected @<file>, got '" + ref + "'");
    std::ifstream is(ref.substr(1));
    if (!is) throw InvalidArgument(std::string(option) + ": cannot open '" + ref.substr(1) + "'");
    try {
        return read_field(is);
    } catch (const InvalidArgument& e) {
        throw InvalidArgument(std::string(option) + ": " + e.what());
    }
}

ScalarField load_on_grid(const std::string& ref, const char* option, const GridSpec& grid) {
    ScalarField f = load_field(ref, option);
    if (!(f.grid() == grid))
        throw InvalidArgument(std::string(option) + ": grid differs from the obstacle file");
    return f;
}

std::string fmt(double v) {
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

std::string history_csv(const SolveReport& r, bool stamp) {
    std::ostringstream os;
    if (stamp) os << "# generated " << utc_stamp() << '\n';
    const bool errors = !r.l2_err_history.empty();
    os << "iter,linf_diff" << (errors ? ",l2_err,linf_err" : "") << '\n';
    for (std::size_t i = 0; i < r.diff_history.size(); ++i) {
        os << (i + 1) << ',' << fmt(r.diff_history[i]);
        if (errors) os << ',' << fmt(r.l2_err_history[i]) << ',' << fmt(r.linf_err_history[i]);
        os << '\n';
    }
    return os.str();
}

std::string field_text(const ScalarField& u, bool stamp) {
    std::ostringstream os;
    write_field(os, u);
    if (!stamp) return os.str();
    // Header must stay first; the stamp goes after it as a comment row.
    std::string text = os.str();
    const auto eol = text.find('\n');
    return text.substr(0, eol + 1) + "# generated " + utc_stamp() + "\n" + text.substr(eol + 1);
}

json summary_json(const ResolvedRun& run, const SolveReport& r, bool stamp) {
    json j;
    j["problem"] = run.problem.name;
    j["kind"] = std::string(to_string(run.problem.kind));
    j["M"] = run.problem.grid.cells(0);
    j["dx"] = run.problem.grid.dx();
    j["dt"] = run.solver.dt;
    j["iterations"] = r.iterations;
    j["converged"] = r.converged;
    if (run.problem.exact) {
        j["l2_err"] = error_l2(r.u_final, *run.problem.exact);
        j["linf_err"] = error_linf(r.u_final, *run.problem.exact);
    } else {
        j["l2_err"] = nullptr;
        j["linf_err"] = nullptr;
    }
    j["free_boundary"] = r.free_boundary;
    if (!r.warnings.empty()) j["warnings"] = r.warnings;
    if (stamp) j["generated"] = utc_stamp();
    return j;
}

json order_or_na(const std::vector<double>& dx, const std::vector<double>& errors) {
    for (double e : errors)
        if (!(e > kRoundOffError)) return "NA";
    return endpoint_order(dx, errors);
}

json pairwise_or_na(const std::vector<double>& dx, const std::vector<double>& errors) {
    for (double e : errors)
        if (!(e > kRoundOffError)) return "NA";
    return pairwise_orders(dx, errors);
}

void ensure_dir(const std::string& dir) {
    if (!dir.empty()) fs::create_directories(dir);
}

}  // namespace

ResolvedRun resolve(const RunConfig& cfg, int cells) {
    if (cfg.problem.empty()) throw InvalidArgument("--problem is required");
    if (cfg.sweeps != 2 && cfg.sweeps != 4) throw InvalidArgument("--sweeps must be 2 or 4");
    if (cfg.dt && cfg.dt_factor) throw InvalidArgument("--dt and --dt-factor are exclusive");

    ResolvedRun run;
    PresetDefaults defaults;
    if (cfg.problem[0] == '@') {
        ProblemSpec& p = run.problem;
        p.psi = load_field(cfg.problem, "--problem");
        p.name = fs::path(cfg.problem.substr(1)).stem().string();
        p.grid = p.psi->grid();
        p.kind = cfg.upper ? ProblemKind::double_obstacle : ProblemKind::linear;
        if (cfg.upper) p.phi = load_on_grid(*cfg.upper, "--upper", p.grid);
        if (cfg.boundary) {
            p.g = BoundaryData::trace(load_on_grid(*cfg.boundary, "--boundary", p.grid));
        } else {
            p.g = BoundaryData::trace(*p.psi);
        }
        p.f = cfg.source ? load_on_grid(*cfg.source, "--source", p.grid) : ScalarField(p.grid);
        if (cfg.exact) p.exact = load_on_grid(*cfg.exact, "--exact", p.grid);
        for (std::size_t k = 0; k < p.grid.node_count(); ++k)
            if (p.grid.is_boundary(k) && !std::isfinite(p.g.at(k)))
                throw InvalidArgument("--boundary: boundary values must be finite");
    } else {
        if (!is_preset(cfg.problem))
            throw InvalidArgument("--problem: unknown preset '" + cfg.problem + "'");
        if (cfg.upper || cfg.boundary || cfg.source || cfg.exact)
            throw InvalidArgument("--upper/--boundary/--source/--exact apply to @file problems only");
        if (cells < 2) throw InvalidArgument("--cells must be >= 2");
        run.problem = preset(cfg.problem, cells);
        defaults = preset_defaults(cfg.problem);
    }
    if (cfg.kind) {
        try {
            run.problem.kind = parse_problem_kind(*cfg.kind);
        } catch (const InvalidArgument& e) {
            throw InvalidArgument(std::string("--kind: ") + e.what());
        }
        if (run.problem.kind == ProblemKind::two_phase && run.problem.mu1 == 0.0 &&
            run.problem.mu2 == 0.0 && cfg.problem[0] == '@')
            throw InvalidArgument("--kind: two-phase needs a two-phase preset");
    }
    run.problem.validate();

    SolverConfig& s = run.solver;
    const double dt_factor = cfg.dt_factor.value_or(defaults.dt_factor);
    s.dt = cfg.dt ? *cfg.dt : dt_factor * run.problem.grid.dx();
    s.alpha = cfg.alpha.value_or(defaults.alpha);
    s.gamma = cfg.gamma.value_or(defaults.gamma);
    s.tol = cfg.tol.value_or(defaults.tol);
    if (cfg.eps1) s.eps1 = *cfg.eps1;
    s.max_outer = cfg.max_outer.value_or(defaults.max_outer);
    s.sweeps = cfg.sweeps == 4 ? SweepCount::four : SweepCount::two;

    auto positive = [](double v, const char* key) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidArgument(std::string(key) + " must be a positive number");
    };
    positive(s.dt, cfg.dt ? "--dt" : "--dt-factor");
    positive(s.alpha, "--alpha");
    positive(s.gamma, "--gamma");
    positive(s.tol, "--tol");
    positive(s.eps1, "--eps1");
    if (s.max_outer < 1) throw InvalidArgument("--max-outer must be >= 1");
    return run;
}

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
    ResolvedRun run;
    try {
        run = resolve(cfg, cfg.cells);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    const SolveReport report = solve(run.problem, run.solver);
    const json summary = summary_json(run, report, cfg.stamp);
    if (!cfg.out.empty()) {
        ensure_dir(cfg.out);
        const fs::path dir(cfg.out);
        write_atomic(dir / "solution.csv", field_text(report.u_final, cfg.stamp));
        write_atomic(dir / "history.csv", history_csv(report, cfg.stamp));
        if (report.v_final) write_atomic(dir / "v.csv", field_text(*report.v_final, cfg.stamp));
        write_atomic(dir / "summary.json", summary.dump(2) + "\n");
    }
    out << summary.dump() << '\n';
    return report.converged ? kOk : kNotConverged;
}

int cmd_convergence(const RunConfig& cfg, const std::vector<int>& levels, std::ostream& out,
                    std::ostream& err) {
    if (levels.size() < 2) {
        err << "error: --levels needs at least two grid sizes\n";
        return kInputError;
    }
    std::vector<ResolvedRun> runs_in;
    try {
        for (int m : levels) {
            runs_in.push_back(resolve(cfg, m));
            if (!runs_in.back().problem.exact) {
                err << "error: --problem: '" << cfg.problem << "' has no exact solution\n";
                return kInputError;
            }
        }
        for (std::size_t i = 1; i < levels.size(); ++i)
            if (levels[i] <= levels[i - 1])
                throw InvalidArgument("--levels must be strictly increasing");
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    // Levels are independent; each solve is deterministic, so running them
    // concurrently does not change the output.
    std::vector<std::future<SolveReport>> pending;
    for (const auto& run : runs_in)
        pending.push_back(std::async(std::launch::async,
                                     [&run] { return solve(run.problem, run.solver); }));
    ConvergenceStudy study;
    json runs = json::array();
    for (std::size_t i = 0; i < runs_in.size(); ++i) {
        const SolveReport r = pending[i].get();
        const ResolvedRun& run = runs_in[i];
        study.add(levels[i], run.problem.grid.dx(), error_l2(r.u_final, *run.problem.exact),
                  error_linf(r.u_final, *run.problem.exact));
        runs.push_back({{"M", levels[i]}, {"iterations", r.iterations}, {"converged", r.converged}});
    }

    json result;
    result["problem"] = cfg.problem;
    result["levels"] = study.levels;
    result["order_l2"] = order_or_na(study.dx, study.errors_l2);
    result["order_linf"] = order_or_na(study.dx, study.errors_linf);
    result["pairwise_l2"] = pairwise_or_na(study.dx, study.errors_l2);
    result["pairwise_linf"] = pairwise_or_na(study.dx, study.errors_linf);
    result["runs"] = runs;
    if (cfg.stamp) result["generated"] = utc_stamp();

    std::ostringstream csv;
    if (cfg.stamp) csv << "# generated " << utc_stamp() << '\n';
    write_study_csv(csv, study);
    if (!cfg.out.empty()) {
        ensure_dir(cfg.out);
        write_atomic(fs::path(cfg.out) / "convergence.csv", csv.str());
        write_atomic(fs::path(cfg.out) / "convergence.json", result.dump(2) + "\n");
    }
    out << csv.str() << result.dump() << '\n';
    return kOk;
}

OracleCheckResult run_oracle_check(const OracleCheckOptions& opts) {
    OracleCheckResult res;
    res.agreement_limit = 10.0 * std::max(opts.solver_tol, opts.oracle_tol);
    const SweepCount sweeps = opts.sweeps == 4 ? SweepCount::four : SweepCount::two;
    for (int i = 0; i < opts.count; ++i) {
        const std::uint64_t seed = opts.seed + static_cast<std::uint64_t>(i);
        const LcpInstance inst = random_instance(seed, opts.cells, opts.dim, opts.upper);
        const ScalarField star = oracle_solve(inst, opts.oracle_tol);

        const ScalarField stepped =
            cade_step(inst.coeffs, star, inst.f, inst.bounds, inst.g, inst.grid().dx(), sweeps);
        double scale = 0.0;
        for (double v : star.values()) scale = std::max(scale, std::abs(v));
        const double fixed = error_linf(stepped, star) / std::max(scale, 1e-300);

        ProblemSpec p;
        p.name = "random";
        p.kind = opts.upper ? ProblemKind::double_obstacle : ProblemKind::linear;
        p.grid = inst.grid();
        p.psi = inst.bounds.lower;
        p.phi = inst.bounds.upper;
        p.f = inst.f;
        p.g = inst.g;
        SolverConfig cfg;
        cfg.dt = inst.grid().dx();
        cfg.tol = opts.solver_tol;
        cfg.sweeps = sweeps;
        const SolveReport r = solve(p, cfg);
        const double agree = error_linf(r.u_final, star);

        res.worst_fixed_point = std::max(res.worst_fixed_point, fixed);
        res.worst_agreement = std::max(res.worst_agreement, agree);
        if (!(fixed < opts.fixed_point_limit) || !(agree <= res.agreement_limit) || !r.converged)
            res.failing_seeds.push_back(seed);
    }
    return res;
}

int cmd_oracle_check(const OracleCheckOptions& opts, std::ostream& out, std::ostream& err) {
    if (opts.count < 0 || opts.cells < 2 || (opts.dim != 1 && opts.dim != 2) ||
        (opts.sweeps != 2 && opts.sweeps != 4)) {
        err << "error: invalid oracle-check options (need --count >= 0, --cells >= 2, "
               "--dim 1|2, --sweeps 2|4)\n";
        return kInputError;
    }
    const OracleCheckResult res = run_oracle_check(opts);
    out << "instances: " << opts.count << " (dim " << opts.dim << ", M " << opts.cells
        << ", sweeps " << opts.sweeps << (opts.upper ? ", upper bound" : "") << ")\n"
        << "worst fixed-point deviation: " << res.worst_fixed_point << " (limit "
        << opts.fixed_point_limit << ")\n"
        << "worst solver/oracle distance: " << res.worst_agreement << " (limit "
        << res.agreement_limit << ")\n";
    if (res.failing_seeds.empty()) return kOk;
    out << "failing seeds:";
    for (auto s : res.failing_seeds) out << ' ' << s;
    out << '\n';
    return kCheckFailed;
}

int cmd_reproduce(const std::string& what, const std::string& out_dir, bool stamp,
                  std::ostream& out, std::ostream& err) {
    const std::string base = out_dir.empty() ? std::string("reproduce") : out_dir;
    if (what == "table1") {
        // Iteration counts for psi1 with dt = 0.1 dx, tol = 1e-11.
        static constexpr int kLevels[] = {64, 128, 256, 512};
        static constexpr int kPublished[] = {299, 595, 1201, 2363};
        std::ostringstream csv;
        if (stamp) csv << "# generated " << utc_stamp() << '\n';
        csv << "M,dx,iterations,published_iterations,converged\n";
        bool all = true;
        for (int i = 0; i < 4; ++i) {
            RunConfig cfg;
            cfg.problem = "psi1";
            cfg.dt_factor = 0.1;
            cfg.tol = 1e-11;
            const ResolvedRun run = resolve(cfg, kLevels[i]);
            const SolveReport r = solve(run.problem, run.solver);
            all = all && r.converged;
            csv << kLevels[i] << ',' << fmt(run.problem.grid.dx()) << ',' << r.iterations << ','
                << kPublished[i] << ',' << (r.converged ? 1 : 0) << '\n';
        }
        ensure_dir(base);
        write_atomic(fs::path(base) / "table1.csv", csv.str());
        out << csv.str();
        return all ? kOk : kNotConverged;
    }
    if (what == "table2") {
        RunConfig cfg;
        cfg.problem = "psi5";
        cfg.dt_factor = 1.0;
        cfg.tol = 1e-11;
        cfg.out = base;
        cfg.stamp = stamp;
        return cmd_convergence(cfg, {32, 64, 128, 256}, out, err);
    }
    if (what == "fig-psi5") {
        RunConfig cfg;
        cfg.problem = "psi5";
        cfg.cells = 256;
        cfg.dt_factor = 1.0;
        cfg.out = (fs::path(base) / "fig-psi5").string();
        cfg.stamp = stamp;
        return cmd_solve(cfg, out, err);
    }
    if (what == "fig-twophase") {
        int worst = kOk;
        for (const char* name : {"twophase-sym", "twophase-asym"}) {
            RunConfig cfg;
            cfg.problem = name;
            cfg.cells = 256;
            cfg.out = (fs::path(base) / "fig-twophase" / name).string();
            cfg.stamp = stamp;
            worst = std::max(worst, cmd_solve(cfg, out, err));
        }
        return worst;
    }
    err << "error: reproduce: unknown target '" << what
        << "' (expected table1, table2, fig-psi5, fig-twophase)\n";
    return kInputError;
}

namespace {

void add_run_options(CLI::App* cmd, RunConfig& cfg) {
    cmd->add_option("--problem", cfg.problem, "Preset name or @field-file")->required();
    cmd->add_option("--cells", cfg.cells, "Cells per axis M");
    cmd->add_option("--dt-factor", cfg.dt_factor, "Time step as a multiple of dx");
    cmd->add_option("--dt", cfg.dt, "Absolute time step");
    cmd->add_option("--alpha", cfg.alpha, "Penalty weight");
    cmd->add_option("--gamma", cfg.gamma, "Evolution speed of u");
    cmd->add_option("--tol", cfg.tol, "Stop when ||u^{n+1}-u^n||_inf < tol");
    cmd->add_option("--eps1", cfg.eps1, "Fixed-point tolerance for p");
    cmd->add_option("--max-outer", cfg.max_outer, "Outer iteration cap");
    cmd->add_option("--sweeps", cfg.sweeps, "Sweep orderings per step (2 or 4)");
    cmd->add_option("--kind", cfg.kind, "Override: linear|nonlinear|double|two-phase");
    cmd->add_option("--upper", cfg.upper, "@file upper obstacle (file problems)");
    cmd->add_option("--boundary", cfg.boundary, "@file whose boundary trace is the Dirichlet data");
    cmd->add_option("--source", cfg.source, "@file source term");
    cmd->add_option("--exact", cfg.exact, "@file exact solution");
    cmd->add_option("--out", cfg.out, "Output directory");
    cmd->add_flag("--stamp", cfg.stamp, "Add generation timestamps to outputs");
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    CLI::App app{"CADE operator-splitting solvers for obstacle-type problems", "cade"};
    app.require_subcommand(1);

    RunConfig solve_cfg;
    auto* solve_cmd = app.add_subcommand("solve", "Solve one problem");
    add_run_options(solve_cmd, solve_cfg);

    RunConfig conv_cfg;
    std::vector<int> levels;
    auto* conv_cmd = app.add_subcommand("convergence", "Grid-refinement study against the exact solution");
    add_run_options(conv_cmd, conv_cfg);
    conv_cmd->add_option("--levels", levels, "Cells per axis, comma separated")
        ->delimiter(',')
        ->required();

    OracleCheckOptions oc;
    auto* oc_cmd = app.add_subcommand("oracle-check", "Cross-check CADE against the LCP oracle");
    oc_cmd->add_option("--seed", oc.seed, "First instance seed");
    oc_cmd->add_option("--count", oc.count, "Number of random instances");
    oc_cmd->add_option("--cells", oc.cells, "Cells per axis M");
    oc_cmd->add_option("--dim", oc.dim, "1 or 2");
    oc_cmd->add_option("--sweeps", oc.sweeps, "2 or 4");
    oc_cmd->add_flag("--upper", oc.upper, "Add a random upper obstacle");
    oc_cmd->add_option("--tol", oc.solver_tol, "Solver stopping tolerance");

    std::string target;
    std::string repro_out;
    bool repro_stamp = false;
    auto* repro_cmd = app.add_subcommand("reproduce", "Run a canned experiment");
    repro_cmd->add_option("target", target, "table1|table2|fig-psi5|fig-twophase")->required();
    repro_cmd->add_option("--out", repro_out, "Output directory");
    repro_cmd->add_flag("--stamp", repro_stamp, "Add generation timestamps to outputs");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::CallForAllHelp& e) {
        app.exit(e, out, err);
        return kOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }

    try {
        if (*solve_cmd) return cmd_solve(solve_cfg, out, err);
        if (*conv_cmd) return cmd_convergence(conv_cfg, levels, out, err);
        if (*oc_cmd) return cmd_oracle_check(oc, out, err);
        if (*repro_cmd) return cmd_reproduce(target, repro_out, repro_stamp, out, err);
    } catch (const InvalidArgument& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kInputError;
    }
    return kInputError;
}

}  // namespace cade::cli
