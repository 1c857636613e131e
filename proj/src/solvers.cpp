#include "cade/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "cade/metrics.hpp"

namespace cade {

namespace {

double sup_diff(const ScalarField& a, const ScalarField& b) {
    double worst = 0.0;
    for (std::size_t k = 0; k < a.size(); ++k) worst = std::max(worst, std::abs(a[k] - b[k]));
    return worst;
}

SweepBounds bounds_of(const ProblemSpec& problem, bool with_upper) {
    SweepBounds b;
    b.lower = problem.psi;
    if (with_upper) b.upper = problem.phi;
    return b;
}

// Shared outer loop: records history and error curves, calls the observer,
// and stops on the sup-norm change of u.
class IterationLog {
public:
    IterationLog(const ProblemSpec& problem, const SolverConfig& cfg, const IterateObserver& obs,
                 SolveReport& report)
        : problem_(problem), cfg_(cfg), obs_(obs), report_(report) {}

    void start(const ScalarField& u0) {
        if (obs_) obs_(0, u0);
    }

    // Returns true when the stopping criterion is met.
    bool record(int n, const ScalarField& prev, const ScalarField& next) {
        const double d = sup_diff(prev, next);
        report_.diff_history.push_back(d);
        report_.iterations = n;
        if (cfg_.track_error && problem_.exact) {
            report_.l2_err_history.push_back(error_l2(next, *problem_.exact));
            report_.linf_err_history.push_back(error_linf(next, *problem_.exact));
        }
        if (obs_) obs_(n, next);
        if (d < cfg_.tol) {
            report_.converged = true;
            return true;
        }
        return false;
    }

private:
    const ProblemSpec& problem_;
    const SolverConfig& cfg_;
    const IterateObserver& obs_;
    SolveReport& report_;
};

void warn_boundary_below_obstacle(const ProblemSpec& problem, SolveReport& report) {
    if (!problem.psi) return;
    for (std::size_t k = 0; k < problem.grid.node_count(); ++k) {
        if (problem.grid.is_boundary(k) && (*problem.psi)[k] > problem.g.at(k)) {
            report.warnings.push_back("boundary data lies below the lower obstacle");
            return;
        }
    }
}

SolveReport run_cade_loop(const ProblemSpec& problem, const SolverConfig& cfg, bool with_upper,
                          const IterateObserver& observer) {
    cfg.validate();
    problem.validate();
    SolveReport report;
    warn_boundary_below_obstacle(problem, report);

    const CadeStepper stepper(OperatorCoeffs{1.0, 0.0}, bounds_of(problem, with_upper), problem.g,
                              cfg.dt, cfg.sweeps);
    IterationLog log(problem, cfg, observer, report);
    ScalarField u = initial_guess(problem);
    log.start(u);
    for (int n = 1; n <= cfg.max_outer; ++n) {
        ScalarField next = stepper.step(u, problem.f);
        const bool done = log.record(n, u, next);
        u = std::move(next);
        if (done) break;
    }
    report.u_final = std::move(u);
    return report;
}

}  // namespace

void SolverConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0) || !std::isfinite(v))
            throw InvalidArgument(std::string(name) + " must be a positive finite number");
    };
    positive(dt, "dt");
    positive(alpha, "alpha");
    positive(gamma, "gamma");
    positive(tol, "tol");
    positive(eps1, "eps1");
    if (max_outer < 1) throw InvalidArgument("max_outer must be >= 1");
    if (max_fixed_point < 1) throw InvalidArgument("max_fixed_point must be >= 1");
}

FixedPointNotConverged::FixedPointNotConverged(double worst_change)
    : std::runtime_error([worst_change] {
          std::ostringstream os;
          os << "p fixed-point iteration hit its cap (worst change " << worst_change << ")";
          return os.str();
      }()),
      worst_change_(worst_change) {}

VectorField fixed_point_p(const VectorField& p_n, double dt, double eps1, int cap) {
    if (!(dt > 0.0)) throw InvalidArgument("dt must be > 0");
    const GridSpec& grid = p_n.grid();
    const int dim = p_n.components();
    VectorField q = p_n;
    double worst = 0.0;
    for (std::size_t k = 0; k < grid.node_count(); ++k) {
        double pn[2] = {p_n(0, k), dim == 2 ? p_n(1, k) : 0.0};
        double cur[2] = {pn[0], pn[1]};
        bool done = false;
        double change = 0.0;
        for (int it = 0; it < cap; ++it) {
            const double scale = 1.0 / (1.0 + dt / std::sqrt(1.0 + cur[0] * cur[0] + cur[1] * cur[1]));
            const double nxt[2] = {scale * pn[0], scale * pn[1]};
            change = std::max(std::abs(nxt[0] - cur[0]), std::abs(nxt[1] - cur[1]));
            cur[0] = nxt[0];
            cur[1] = nxt[1];
            if (change < eps1) {
                done = true;
                break;
            }
        }
        if (!done) worst = std::max(worst, change);
        q(0, k) = cur[0];
        if (dim == 2) q(1, k) = cur[1];
    }
    if (worst > 0.0) throw FixedPointNotConverged(worst);
    return q;
}

VectorField update_p_exponential(const VectorField& p_half, const ScalarField& u_next,
                                 double alpha, double dt) {
    if (!(alpha > 0.0) || !(dt > 0.0)) throw InvalidArgument("alpha and dt must be > 0");
    require_same_grid(p_half.grid(), u_next.grid(), "update_p_exponential");
    const double keep = std::exp(-alpha * dt);
    const double take = -std::expm1(-alpha * dt);
    const VectorField grad = gradient_h(u_next);
    VectorField out(p_half.grid());
    auto o = out.values();
    const auto p = p_half.values();
    const auto g = grad.values();
    for (std::size_t k = 0; k < o.size(); ++k) o[k] = keep * p[k] + take * g[k];
    return out;
}

ScalarField shrink_v(const ScalarField& v_n, const ScalarField& u_n, double lambda2, double alpha,
                     double dt) {
    if (!(lambda2 >= 0.0) || !(alpha > 0.0) || !(dt > 0.0))
        throw InvalidArgument("shrink_v needs lambda2 >= 0, alpha > 0, dt > 0");
    require_same_grid(v_n.grid(), u_n.grid(), "shrink_v");
    const double denom = 1.0 + alpha * dt;
    const double threshold = lambda2 * dt / denom;
    ScalarField out(v_n.grid());
    for (std::size_t k = 0; k < out.size(); ++k) {
        const double w = (v_n[k] + alpha * dt * u_n[k]) / denom;
        const double mag = std::max(0.0, std::abs(w) - threshold);
        out[k] = mag == 0.0 ? 0.0 : std::copysign(mag, w);
    }
    return out;
}

ScalarField initial_guess(const ProblemSpec& problem) {
    ScalarField u = interp_boundary_lift(problem.g);
    for (std::size_t k = 0; k < u.size(); ++k) {
        if (problem.psi) u[k] = std::max((*problem.psi)[k], u[k]);
        if (problem.phi) u[k] = std::min((*problem.phi)[k], u[k]);
    }
    problem.g.apply(u);
    return u;
}

SolveReport solve_linear(const ProblemSpec& problem, const SolverConfig& cfg,
                         const IterateObserver& observer) {
    if (problem.phi) throw InvalidArgument("solve_linear: problem has an upper obstacle; use solve_double");
    return run_cade_loop(problem, cfg, false, observer);
}

SolveReport solve_double(const ProblemSpec& problem, const SolverConfig& cfg,
                         const IterateObserver& observer) {
    return run_cade_loop(problem, cfg, true, observer);
}

SolveReport solve_nonlinear(const ProblemSpec& problem, const SolverConfig& cfg,
                            const IterateObserver& observer) {
    cfg.validate();
    problem.validate();
    SolveReport report;
    warn_boundary_below_obstacle(problem, report);

    const CadeStepper stepper(OperatorCoeffs{cfg.alpha, 0.0}, bounds_of(problem, true), problem.g,
                              cfg.dt / cfg.gamma, cfg.sweeps);
    IterationLog log(problem, cfg, observer, report);
    ScalarField u = initial_guess(problem);
    VectorField p = gradient_h(u);
    ScalarField source(problem.grid);
    log.start(u);
    for (int n = 1; n <= cfg.max_outer; ++n) {
        const VectorField p_half = fixed_point_p(p, cfg.dt, cfg.eps1, cfg.max_fixed_point);
        const ScalarField div = divergence_h(p_half);
        for (std::size_t k = 0; k < source.size(); ++k)
            source[k] = problem.f[k] - cfg.alpha * div[k];
        ScalarField next = stepper.step(u, source);
        p = update_p_exponential(p_half, next, cfg.alpha, cfg.dt);
        const bool done = log.record(n, u, next);
        u = std::move(next);
        if (done) break;
    }
    report.u_final = std::move(u);
    report.p_final = std::move(p);
    return report;
}

SolveReport solve_two_phase(const ProblemSpec& problem, const SolverConfig& cfg,
                            const IterateObserver& observer) {
    cfg.validate();
    problem.validate();
    if (problem.kind != ProblemKind::two_phase)
        throw InvalidArgument("solve_two_phase needs a two-phase problem");
    SolveReport report;

    const double lambda1 = 0.5 * (problem.mu1 - problem.mu2);
    const double lambda2 = 0.5 * (problem.mu1 + problem.mu2);
    const CadeStepper stepper(OperatorCoeffs{1.0, cfg.alpha}, SweepBounds{}, problem.g,
                              cfg.dt / cfg.gamma, cfg.sweeps);
    IterationLog log(problem, cfg, observer, report);
    ScalarField u = initial_guess(problem);
    ScalarField v = u;
    ScalarField source(problem.grid);
    log.start(u);
    for (int n = 1; n <= cfg.max_outer; ++n) {
        v = shrink_v(v, u, lambda2, cfg.alpha, cfg.dt);
        for (std::size_t k = 0; k < source.size(); ++k)
            source[k] = problem.f[k] - lambda1 + cfg.alpha * v[k];
        ScalarField next = stepper.step(u, source);
        const bool done = log.record(n, u, next);
        u = std::move(next);
        if (done) break;
    }
    // v vanishes exactly on the (regularised) coincidence set; its zero set
    // locates the free boundary.
    if (problem.grid.dim() == 1) report.free_boundary = free_boundary_1d(v, 0.0);
    report.u_final = std::move(u);
    report.v_final = std::move(v);
    return report;
}

SolveReport solve(const ProblemSpec& problem, const SolverConfig& cfg,
                  const IterateObserver& observer) {
    switch (problem.kind) {
        case ProblemKind::linear: return solve_linear(problem, cfg, observer);
        case ProblemKind::nonlinear: return solve_nonlinear(problem, cfg, observer);
        case ProblemKind::double_obstacle: return solve_double(problem, cfg, observer);
        case ProblemKind::two_phase: return solve_two_phase(problem, cfg, observer);
    }
    throw InvalidArgument("unknown problem kind");
}

}  // namespace cade
