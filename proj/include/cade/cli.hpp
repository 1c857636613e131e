#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cade/problem_catalog.hpp"
#include "cade/solvers.hpp"

namespace cade::cli {

enum ExitCode : int {
    kOk = 0,
    kInputError = 1,
    kNotConverged = 2,
    kCheckFailed = 3,
};

/// Problem source and solver overrides as given on the command line.
///
/// `problem` is either a preset name or `@path` to a field file holding the
/// lower obstacle. File problems take their grid from that file; the boundary
/// data defaults to the obstacle's boundary trace.
struct RunConfig {
    std::string problem;
    int cells = 256;
    std::optional<double> dt_factor;
    std::optional<double> dt;
    std::optional<double> alpha;
    std::optional<double> gamma;
    std::optional<double> tol;
    std::optional<double> eps1;
    std::optional<int> max_outer;
    int sweeps = 2;
    std::optional<std::string> kind;
    std::optional<std::string> upper;     // @file, file problems only
    std::optional<std::string> boundary;  // @file
    std::optional<std::string> source;    // @file
    std::optional<std::string> exact;     // @file
    std::string out;                      // output directory; empty = stdout only
    bool stamp = false;
};

struct ResolvedRun {
    ProblemSpec problem;
    SolverConfig solver;
};

/// Builds the problem and solver configuration. Throws InvalidArgument with a
/// message naming the offending option.
ResolvedRun resolve(const RunConfig& cfg, int cells);

int cmd_solve(const RunConfig& cfg, std::ostream& out, std::ostream& err);
int cmd_convergence(const RunConfig& cfg, const std::vector<int>& levels, std::ostream& out,
                    std::ostream& err);

struct OracleCheckOptions {
    std::uint64_t seed = 1;
    int count = 100;
    int cells = 16;
    int dim = 1;
    int sweeps = 2;
    bool upper = false;
    double solver_tol = 1e-11;
    double oracle_tol = 1e-14;
    double fixed_point_limit = 1e-12;  // relative sup-norm change of one step
};

struct OracleCheckResult {
    double worst_fixed_point = 0.0;
    double worst_agreement = 0.0;
    double agreement_limit = 0.0;
    std::vector<std::uint64_t> failing_seeds;
};

/// Instance i uses seed + i. Checks that one CADE step leaves the oracle
/// solution fixed and that the full solver converges to it.
OracleCheckResult run_oracle_check(const OracleCheckOptions& opts);
int cmd_oracle_check(const OracleCheckOptions& opts, std::ostream& out, std::ostream& err);

/// table1 | table2 | fig-psi5 | fig-twophase
int cmd_reproduce(const std::string& what, const std::string& out_dir, bool stamp,
                  std::ostream& out, std::ostream& err);

/// Entry point used by the `cade` executable.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace cade::cli
