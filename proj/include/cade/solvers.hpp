#pragma once

#include <functional>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cade/ade_core.hpp"
#include "cade/grid.hpp"
#include "cade/problem_catalog.hpp"

namespace cade {

struct SolverConfig {
    double dt = 0.0;             // time step; required
    double alpha = 1.0;          // penalty weight (nonlinear, two-phase)
    double gamma = 1.0;          // evolution speed of u
    double tol = 1e-11;          // stop when ||u^{n+1} - u^n||_inf < tol
    double eps1 = 1e-10;         // fixed-point tolerance for the p-subproblem
    int max_outer = 100000;
    int max_fixed_point = 200;
    SweepCount sweeps = SweepCount::two;
    bool track_error = true;     // record error histories when the problem has an exact solution

    void validate() const;
};

struct SolveReport {
    ScalarField u_final;
    std::optional<VectorField> p_final;
    std::optional<ScalarField> v_final;
    int iterations = 0;
    std::vector<double> diff_history;
    std::vector<double> l2_err_history;    // empty without an exact solution
    std::vector<double> linf_err_history;
    bool converged = false;
    std::vector<double> free_boundary;     // two-phase only
    std::vector<std::string> warnings;
};

/// Called with (n, u^n) for the initial guess (n = 0) and every iterate.
using IterateObserver = std::function<void(int, const ScalarField&)>;

/// The p-subproblem did not reach eps1 within the iteration cap.
class FixedPointNotConverged : public std::runtime_error {
public:
    explicit FixedPointNotConverged(double worst_change);
    double worst_change() const { return worst_change_; }

private:
    double worst_change_;
};

/// Nodewise fixed point q <- p_n / (1 + dt / sqrt(1 + |q|^2)) from q = p_n.
VectorField fixed_point_p(const VectorField& p_n, double dt, double eps1, int cap);

/// exp(-alpha dt) p_half + (1 - exp(-alpha dt)) grad_h(u_next).
VectorField update_p_exponential(const VectorField& p_half, const ScalarField& u_next,
                                 double alpha, double dt);

/// Exact nodewise minimiser of 1/2 (v - v_n)^2 + lambda2 dt |v| + alpha dt / 2 (v - u_n)^2.
ScalarField shrink_v(const ScalarField& v_n, const ScalarField& u_n, double lambda2, double alpha,
                     double dt);

/// max(psi, lift(g)), clamped below phi, with boundary values from g.
ScalarField initial_guess(const ProblemSpec& problem);

SolveReport solve_linear(const ProblemSpec& problem, const SolverConfig& cfg,
                         const IterateObserver& observer = {});
SolveReport solve_nonlinear(const ProblemSpec& problem, const SolverConfig& cfg,
                            const IterateObserver& observer = {});
SolveReport solve_double(const ProblemSpec& problem, const SolverConfig& cfg,
                         const IterateObserver& observer = {});
SolveReport solve_two_phase(const ProblemSpec& problem, const SolverConfig& cfg,
                            const IterateObserver& observer = {});

/// Dispatches on problem.kind.
SolveReport solve(const ProblemSpec& problem, const SolverConfig& cfg,
                  const IterateObserver& observer = {});

}  // namespace cade
